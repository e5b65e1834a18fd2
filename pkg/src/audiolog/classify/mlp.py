"""Feed-forward classifier: logistic hidden layers, softmax output.

Trained by mini-batch SGD with momentum on mean softmax cross-entropy,
with inverted dropout on hidden activations. Inputs are z-normalised with
statistics stored in the model, so a trained model maps raw feature
vectors to class probabilities on its own.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DimensionMismatch, ModelFormatError, NonfiniteLoss
from ..features.vector import FeatureVector, ZScaler
from .labels import MOOD_CLASSES, label_value

FORMAT = "audiolog.mlp"
VERSION = 1

PAPER_HIDDEN = (2048, 2048, 1024, 1024)
DESK_HIDDEN = (64, 64, 32, 32)


@dataclass(frozen=True)
class MlpConfig:
    hidden: tuple[int, ...] = DESK_HIDDEN
    learning_rate: float = 0.05
    momentum: float = 0.9
    epochs: int = 300
    batch_size: int = 16
    dropout: float = 0.2
    seed: int = 0


def sigmoid(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    e = np.exp(a[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(p: np.ndarray, y: np.ndarray) -> float:
    return float(-np.mean(np.log(np.maximum(p[np.arange(y.size), y], 1e-300))))


@dataclass
class MlpModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    classes: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    dropout_rate: float = 0.0
    history: list[float] = field(default_factory=list)

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @classmethod
    def initialise(cls, layer_sizes, classes, rng: np.random.Generator, dropout: float = 0.0) -> MlpModel:
        ws, bs = [], []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            ws.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            bs.append(np.zeros(fan_out))
        d = layer_sizes[0]
        return cls(ws, bs, tuple(classes), np.zeros(d), np.ones(d), dropout)

    # -- forward / backward ---------------------------------------------

    def forward(self, xn: np.ndarray, rng: np.random.Generator | None = None):
        """Activations per layer (input first, softmax last) and dropout masks.

        Dropout is applied only when ``rng`` is given.
        """
        acts, masks = [xn], []
        h = xn
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = sigmoid(h @ w + b)
            if rng is not None and self.dropout_rate > 0:
                keep = 1.0 - self.dropout_rate
                m = (rng.random(h.shape) < keep) / keep
                h = h * m
                masks.append(m)
            else:
                masks.append(None)
            acts.append(h)
        acts.append(softmax(h @ self.weights[-1] + self.biases[-1]))
        return acts, masks

    def backward(self, acts, masks, y: np.ndarray):
        n = y.size
        delta = acts[-1].copy()
        delta[np.arange(n), y] -= 1.0
        delta /= n
        gw = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            gw[i] = acts[i].T @ delta
            gb[i] = delta.sum(axis=0)
            if i == 0:
                break
            dh = delta @ self.weights[i].T
            h = acts[i]
            m = masks[i - 1]
            if m is None:
                delta = dh * h * (1.0 - h)
            else:
                # h already carries the mask; recover the pre-dropout sigmoid output
                s = np.divide(h, m, out=np.zeros_like(h), where=m > 0)
                delta = dh * m * s * (1.0 - s)
        return gw, gb

    def loss_and_gradients(self, xn: np.ndarray, y: np.ndarray):
        """Cross-entropy and its exact gradients on normalised inputs, dropout off."""
        acts, masks = self.forward(xn)
        gw, gb = self.backward(acts, masks, y)
        return cross_entropy(acts[-1], y), gw, gb

    # -- inference --------------------------------------------------------

    def normalise(self, rows) -> np.ndarray:
        x = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        if x.shape[1] != self.mean.size:
            raise DimensionMismatch(f"expected {self.mean.size} features, got {x.shape[1]}")
        return (x - self.mean) / self.std

    def predict_proba(self, rows) -> np.ndarray:
        return self.forward(self.normalise(rows))[0][-1]

    def predict(self, rows) -> list[str]:
        return [self.classes[i] for i in np.argmax(self.predict_proba(rows), axis=1)]

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": FORMAT,
            "version": VERSION,
            "classes": list(self.classes),
            "layer_sizes": self.layer_sizes,
            "hidden_activation": "logsig",
            "output_activation": "softmax",
            "dropout": self.dropout_rate,
            "weights": [w.ravel().tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "normalization": {"mean": self.mean.tolist(), "std": self.std.tolist()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> MlpModel:
        if d.get("format") != FORMAT or d.get("version") != VERSION:
            raise ModelFormatError(f"not a version-{VERSION} MLP document")
        sizes = d["layer_sizes"]
        ws = [np.asarray(w, dtype=np.float64).reshape(a, b) for w, a, b in zip(d["weights"], sizes[:-1], sizes[1:])]
        bs = [np.asarray(b, dtype=np.float64) for b in d["biases"]]
        norm = d["normalization"]
        return cls(ws, bs, tuple(d["classes"]), np.asarray(norm["mean"], dtype=np.float64),
                   np.asarray(norm["std"], dtype=np.float64), float(d["dropout"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path: str | Path) -> MlpModel:
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc


def train_mlp(rows, labels, cfg: MlpConfig = MlpConfig(), classes=None) -> MlpModel:
    """Train on raw feature rows; ``classes`` defaults to the five mood labels."""
    x = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    names = [label_value(v) for v in labels]
    classes = tuple(classes) if classes is not None else MOOD_CLASSES
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[v] for v in names])
    if len(set(names)) < 2:
        raise ValueError("training labels must contain at least two classes")

    rng = np.random.default_rng(cfg.seed)
    sizes = [x.shape[1], *cfg.hidden, len(classes)]
    model = MlpModel.initialise(sizes, classes, rng, cfg.dropout)
    scaler = ZScaler().fit(x)
    model.mean, model.std = scaler.mean, scaler.std
    xn = scaler.transform(x)

    vw = [np.zeros_like(w) for w in model.weights]
    vb = [np.zeros_like(b) for b in model.biases]
    n = xn.shape[0]
    bs = max(1, min(cfg.batch_size, n))
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, bs):
            idx = order[start : start + bs]
            acts, masks = model.forward(xn[idx], rng)
            loss = cross_entropy(acts[-1], y[idx])
            if not np.isfinite(loss):
                raise NonfiniteLoss(f"loss {loss} at epoch {epoch}, batch {start // bs}; lr={cfg.learning_rate}")
            gw, gb = model.backward(acts, masks, y[idx])
            for i in range(len(model.weights)):
                vw[i] = cfg.momentum * vw[i] - cfg.learning_rate * gw[i]
                vb[i] = cfg.momentum * vb[i] - cfg.learning_rate * gb[i]
                model.weights[i] += vw[i]
                model.biases[i] += vb[i]
            total += loss * idx.size
        model.history.append(total / n)
    return model


def classify_mood(model: MlpModel, features) -> tuple[str, np.ndarray]:
    """Most probable label (lowest class index on ties) and the softmax vector."""
    values = features.values if isinstance(features, FeatureVector) else features
    p = model.predict_proba(values)[0]
    return model.classes[int(np.argmax(p))], p
