"""Confusion matrices, F1 scores, fold aggregation, silhouettes and fidelity accounting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .neighbors import sq_distances
from .tabular import Dataset


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""

    counts: np.ndarray

    @classmethod
    def from_predictions(cls, y_true, y_pred, n_classes: int) -> "ConfusionMatrix":
        cm = np.zeros((n_classes, n_classes), dtype=np.int64)
        np.add.at(cm, (np.asarray(y_true), np.asarray(y_pred)), 1)
        return cls(cm)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def accuracy(self) -> float:
        if self.total == 0:
            raise ValueError("empty confusion matrix")
        return float(np.trace(self.counts) / self.total)

    def to_json(self) -> list[list[int]]:
        return self.counts.tolist()


def per_class_f1(cm: ConfusionMatrix) -> np.ndarray:
    """F1 per class; an undefined precision or recall counts as 0."""
    c = cm.counts.astype(np.float64)
    tp = np.diag(c)
    predicted = c.sum(axis=0)
    actual = c.sum(axis=1)
    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    recall = np.divide(tp, actual, out=np.zeros_like(tp), where=actual > 0)
    denom = precision + recall
    return np.divide(2 * precision * recall, denom, out=np.zeros_like(tp), where=denom > 0)


def macro_f1(cm: ConfusionMatrix) -> tuple[float, np.ndarray]:
    """Unweighted mean of per-class F1 over all K classes, plus the per-class vector."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    f1 = per_class_f1(cm)
    return float(np.mean(f1)), f1


@dataclass(frozen=True)
class FoldAggregate:
    mean: float
    std: float

    def __str__(self) -> str:
        return f"{self.mean:.3f} ± {self.std:.3f}"

    def to_json(self) -> dict:
        return {"mean": self.mean, "std": self.std}


def aggregate_folds(scores: Sequence[float]) -> FoldAggregate:
    """Mean and population standard deviation (divide by k) over folds."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.size < 2:
        raise ValueError("need at least two folds to aggregate")
    return FoldAggregate(float(arr.mean()), float(arr.std()))


# -- silhouette --------------------------------------------------------------

def standardize(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - X.mean(axis=0)) / sd


def silhouette(X: np.ndarray, labels, standardized: bool = True) -> tuple[np.ndarray, dict]:
    """Per-sample silhouette coefficients and per-label means.

    Uses Euclidean distance, on z-scored features by default.  Members of a
    singleton group score 0, as do points with ``a = b = 0``.
    """
    labels = np.asarray(labels)
    groups = list(dict.fromkeys(labels.tolist()))
    if len(groups) < 2:
        raise ValueError("silhouette needs at least two labelled groups")
    Z = standardize(X) if standardized else np.asarray(X, dtype=np.float64)
    D = np.sqrt(sq_distances(Z, Z))
    s = np.zeros(len(labels))
    masks = {g: labels == g for g in groups}
    for i in range(len(labels)):
        own = masks[labels[i]]
        n_own = own.sum()
        if n_own == 1:
            continue
        a = D[i, own].sum() / (n_own - 1)
        b = min(D[i, masks[g]].mean() for g in groups if g != labels[i])
        m = max(a, b)
        s[i] = 0.0 if m == 0 else (b - a) / m
    return s, {g: float(s[masks[g]].mean()) for g in groups}


# -- fidelity ------------------------------------------------------------------

@dataclass(frozen=True)
class ClassFidelity:
    name: str
    real: int
    synthetic: int

    @property
    def real_fraction(self) -> float:
        total = self.real + self.synthetic
        return self.real / total if total else 0.0

    @property
    def ratio(self) -> float | None:
        """Synthetic rows per real row; ``None`` when a class has no real rows."""
        if self.real == 0:
            return None if self.synthetic else 0.0
        return self.synthetic / self.real

    def to_json(self) -> dict:
        return {
            "class": self.name,
            "real": self.real,
            "synthetic": self.synthetic,
            "real_fraction": self.real_fraction,
            "synthetic_to_real": self.ratio,
        }


@dataclass(frozen=True)
class FidelityProfile:
    classes: tuple[ClassFidelity, ...]

    @property
    def synthetic_fraction(self) -> float:
        real = sum(c.real for c in self.classes)
        syn = sum(c.synthetic for c in self.classes)
        return syn / (real + syn) if real + syn else 0.0

    def by_name(self, name: str) -> ClassFidelity:
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"classes": [c.to_json() for c in self.classes], "synthetic_fraction": self.synthetic_fraction}


def fidelity_from_counts(names: Sequence[str], real: Sequence[int], synthetic: Sequence[int]) -> FidelityProfile:
    return FidelityProfile(tuple(ClassFidelity(n, int(r), int(s)) for n, r, s in zip(names, real, synthetic)))


def fidelity_profile(ds: Dataset) -> FidelityProfile:
    """Per-class real/synthetic counts taken solely from row provenance."""
    is_real = ds.is_real
    real = np.bincount(ds.y[is_real], minlength=ds.n_classes)
    syn = np.bincount(ds.y[~is_real], minlength=ds.n_classes)
    return fidelity_from_counts(ds.label_vocab, real, syn)
