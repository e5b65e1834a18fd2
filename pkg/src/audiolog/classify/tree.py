"""Binary decision tree grown greedily by gain ratio (C4.5 split criterion).

Continuous features only. Candidate thresholds are midpoints between
consecutive distinct values; a split sends ``x <= threshold`` left. There
is no pruning: growth stops at ``max_depth``, when a child would fall below
``min_leaf`` rows, or at a pure node. An impure node with a valid split is
always split, even when every candidate has zero gain, so parity-style
problems such as XOR are still learned.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DimensionMismatch, ModelFormatError
from .labels import label_value

FORMAT = "audiolog.decision_tree"
VERSION = 1
_TIE = 1e-12


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 12
    min_leaf: int = 5


@dataclass
class Node:
    distribution: np.ndarray
    feature: int = -1
    threshold: float = 0.0
    left: Node | None = None
    right: Node | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def label_index(self) -> int:
        return int(np.argmax(self.distribution))


@dataclass
class DecisionTree:
    root: Node
    classes: tuple[str, ...]
    n_features: int
    max_depth: int = 12
    min_leaf: int = 5
    single_class: bool = field(default=False)

    def depth(self, node: Node | None = None) -> int:
        node = node or self.root
        if node.is_leaf:
            return 0
        return 1 + max(self.depth(node.left), self.depth(node.right))

    def leaves(self) -> list[Node]:
        out, stack = [], [self.root]
        while stack:
            n = stack.pop()
            if n.is_leaf:
                out.append(n)
            else:
                stack.extend([n.right, n.left])
        return out

    def leaf_for(self, x: np.ndarray) -> Node:
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node

    def predict_one(self, x) -> tuple[str, float]:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.size != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {x.size}")
        leaf = self.leaf_for(x)
        i = leaf.label_index
        return self.classes[i], float(leaf.distribution[i])

    def predict(self, rows) -> list[str]:
        return [self.predict_one(r)[0] for r in np.atleast_2d(rows)]

    # -- serialisation --------------------------------------------------

    def to_dict(self) -> dict:
        nodes = []

        def visit(n: Node) -> int:
            i = len(nodes)
            nodes.append(None)
            rec = {"distribution": n.distribution.tolist()}
            if not n.is_leaf:
                rec["feature"] = n.feature
                rec["threshold"] = n.threshold
                rec["left"] = visit(n.left)
                rec["right"] = visit(n.right)
            nodes[i] = rec
            return i

        visit(self.root)
        return {
            "format": FORMAT,
            "version": VERSION,
            "classes": list(self.classes),
            "n_features": self.n_features,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "single_class": self.single_class,
            "nodes": nodes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> DecisionTree:
        if d.get("format") != FORMAT or d.get("version") != VERSION:
            raise ModelFormatError(f"not a version-{VERSION} decision tree document")
        recs = d["nodes"]

        def build(i: int) -> Node:
            r = recs[i]
            node = Node(np.asarray(r["distribution"], dtype=np.float64))
            if "feature" in r:
                node.feature = int(r["feature"])
                node.threshold = float(r["threshold"])
                node.left, node.right = build(r["left"]), build(r["right"])
            return node

        return cls(build(0), tuple(d["classes"]), int(d["n_features"]), int(d["max_depth"]),
                   int(d["min_leaf"]), bool(d.get("single_class", False)))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def load(cls, path: str | Path) -> DecisionTree:
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc


def entropy(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts[counts > 0] / n
    return float(-(p * np.log2(p)).sum())


def gain_ratio(y: np.ndarray, left: np.ndarray, n_classes: int) -> tuple[float, float]:
    """(gain ratio, information gain) for splitting integer labels ``y`` by mask ``left``."""
    n = y.size
    nl = int(left.sum())
    nr = n - nl
    if nl == 0 or nr == 0:
        return 0.0, 0.0
    cl = np.bincount(y[left], minlength=n_classes)
    cr = np.bincount(y[~left], minlength=n_classes)
    gain = entropy(cl + cr) - (nl / n) * entropy(cl) - (nr / n) * entropy(cr)
    split_info = entropy(np.array([nl, nr]))
    return gain / split_info, gain


def candidate_thresholds(values: np.ndarray) -> np.ndarray:
    u = np.unique(values)
    return (u[:-1] + u[1:]) / 2.0


def best_split(x: np.ndarray, y: np.ndarray, n_classes: int, min_leaf: int) -> tuple[int, float, float] | None:
    """(feature, threshold, gain ratio) maximising gain ratio; ties go to lower feature, then lower threshold."""
    best = None
    for f in range(x.shape[1]):
        col = x[:, f]
        for thr in candidate_thresholds(col):
            left = col <= thr
            nl = int(left.sum())
            if nl < min_leaf or y.size - nl < min_leaf:
                continue
            gr, _ = gain_ratio(y, left, n_classes)
            if best is None or gr > best[2] + _TIE:
                best = (f, float(thr), gr)
    return best


def _grow(x, y, n_classes, depth, cfg: TreeConfig) -> Node:
    counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    node = Node(counts / counts.sum())
    if depth >= cfg.max_depth or np.count_nonzero(counts) <= 1:
        return node
    split = best_split(x, y, n_classes, cfg.min_leaf)
    if split is None:
        return node
    f, thr, _ = split
    left = x[:, f] <= thr
    node.feature, node.threshold = f, thr
    node.left = _grow(x[left], y[left], n_classes, depth + 1, cfg)
    node.right = _grow(x[~left], y[~left], n_classes, depth + 1, cfg)
    return node


def train_tree(rows, labels, cfg: TreeConfig = TreeConfig(), classes=None) -> DecisionTree:
    """Grow a tree. A single-class input yields a one-leaf tree with ``single_class`` set."""
    x = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    names = [label_value(v) for v in labels]
    if x.shape[0] != len(names) or x.shape[0] == 0:
        raise ValueError("rows and labels must be non-empty and of equal length")
    if not np.all(np.isfinite(x)):
        raise ValueError("tree input contains missing or non-finite values")
    classes = tuple(classes) if classes is not None else tuple(sorted(set(names)))
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[v] for v in names])
    root = _grow(x, y, len(classes), 0, cfg)
    single = len(set(names)) < 2
    return DecisionTree(root, classes, x.shape[1], cfg.max_depth, cfg.min_leaf, single)


def classify_environment(tree: DecisionTree, clip_features) -> tuple[str, float]:
    """Leaf majority label and its share of the leaf's training rows."""
    return tree.predict_one(clip_features)
