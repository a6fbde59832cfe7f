"""Shared classifier plumbing: validation, class weights, prediction."""

from __future__ import annotations

import numpy as np


class TrainingError(ValueError):
    pass


def check_training_data(X: np.ndarray, y: np.ndarray, n_classes: int) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) == 0:
        raise TrainingError("training data must be a non-empty 2-D matrix")
    if len(X) != len(y):
        raise TrainingError("feature and label counts differ")
    if not np.all(np.isfinite(X)):
        raise TrainingError("non-finite feature values")
    if len(np.unique(y)) < 2:
        raise TrainingError("training data contains a single class")
    if y.min() < 0 or y.max() >= n_classes:
        raise TrainingError("labels outside [0, n_classes)")
    return X, y


def balanced_class_weights(y: np.ndarray, n_classes: int) -> np.ndarray:
    """``N / (K * n_k)`` for each class present; absent classes get weight 0."""
    counts = np.bincount(y, minlength=n_classes).astype(float)
    present = counts > 0
    w = np.zeros(n_classes)
    w[present] = len(y) / (present.sum() * counts[present])
    return w


def sample_weights(y: np.ndarray, n_classes: int, class_weight: str | None) -> np.ndarray:
    if class_weight is None:
        return np.ones(len(y))
    if class_weight == "balanced":
        return balanced_class_weights(y, n_classes)[y]
    raise TrainingError(f"unknown class_weight {class_weight!r}")


class TrainedModel:
    """Base class: subclasses provide ``scores`` and JSON state."""

    kind: str = ""
    n_features: int
    n_classes: int

    def scores(self, X: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        return X

    def predict(self, X) -> np.ndarray:
        """Argmax of the per-class scores; ties go to the lowest class index."""
        return np.argmax(self.scores(self._check(X)), axis=1)

    def predict_one(self, features) -> tuple[int, np.ndarray]:
        s = self.scores(self._check(features))[0]
        return int(np.argmax(s)), s

    def state(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    @classmethod
    def from_state(cls, state: dict) -> "TrainedModel":  # pragma: no cover - abstract
        raise NotImplementedError
