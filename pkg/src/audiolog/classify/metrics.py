from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyTestSet
from .labels import label_value


@dataclass(frozen=True)
class Metrics:
    classes: tuple[str, ...]
    confusion: np.ndarray  # rows: true class, columns: predicted class
    n: int

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.confusion) / self.n)

    @property
    def precision(self) -> dict[str, float]:
        col = self.confusion.sum(axis=0)
        diag = np.diag(self.confusion)
        return {c: float(diag[i] / col[i]) if col[i] else 0.0 for i, c in enumerate(self.classes)}

    @property
    def recall(self) -> dict[str, float]:
        row = self.confusion.sum(axis=1)
        diag = np.diag(self.confusion)
        return {c: float(diag[i] / row[i]) if row[i] else 0.0 for i, c in enumerate(self.classes)}

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "classes": list(self.classes),
            "precision": self.precision,
            "recall": self.recall,
            "confusion": self.confusion.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def table(self) -> str:
        w = max(8, *(len(c) for c in self.classes)) + 1
        lines = [f"accuracy {self.accuracy:.4f} over {self.n} items", ""]
        lines.append("true \\ pred".ljust(w) + "".join(c.rjust(w) for c in self.classes) + "recall".rjust(w))
        rec, prec = self.recall, self.precision
        for i, c in enumerate(self.classes):
            cells = "".join(str(int(v)).rjust(w) for v in self.confusion[i])
            lines.append(c.ljust(w) + cells + f"{rec[c]:.3f}".rjust(w))
        lines.append("precision".ljust(w) + "".join(f"{prec[c]:.3f}".rjust(w) for c in self.classes))
        return "\n".join(lines)


def confusion_metrics(true_labels, predicted, classes) -> Metrics:
    t = [label_value(v) for v in true_labels]
    p = [label_value(v) for v in predicted]
    if not t:
        raise EmptyTestSet("no test items")
    classes = tuple(classes)
    index = {c: i for i, c in enumerate(classes)}
    cm = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for a, b in zip(t, p):
        cm[index[a], index[b]] += 1
    return Metrics(classes, cm, len(t))


def evaluate(model, rows, labels) -> Metrics:
    """Accuracy, per-class precision/recall and confusion matrix for a tree or MLP."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64)) if len(rows) else rows
    if len(labels) == 0:
        raise EmptyTestSet("no test items")
    return confusion_metrics(labels, model.predict(rows), model.classes)
