"""Multinomial logistic regression trained by accelerated gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import TrainedModel


def softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def log_softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    return Z - np.log(np.exp(Z).sum(axis=1, keepdims=True))


@dataclass
class LogisticObjective:
    """Weighted mean cross-entropy plus ``0.5 * lam * |W|^2`` (bias unpenalised).

    With ``lam = 1 / (C * sum(w))`` this is the usual ``C * sum(w_i * CE_i) +
    0.5 * |W|^2`` scaled by ``1 / (C * sum(w))``.
    """

    X: np.ndarray
    Y: np.ndarray  # one-hot, n x K
    w: np.ndarray
    lam: float

    def value(self, W: np.ndarray, b: np.ndarray) -> float:
        lp = log_softmax(self.X @ W + b)
        ce = -(self.Y * lp).sum(axis=1)
        return float((self.w * ce).sum() / self.w.sum() + 0.5 * self.lam * (W * W).sum())

    def grad(self, W: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        G = (softmax(self.X @ W + b) - self.Y) * (self.w / self.w.sum())[:, None]
        return self.X.T @ G + self.lam * W, G.sum(axis=0)


class LogisticModel(TrainedModel):
    kind = "logistic_regression"

    def __init__(self, W: np.ndarray, b: np.ndarray, converged: bool = True, epochs: int = 0):
        self.W = np.asarray(W, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.n_features, self.n_classes = self.W.shape
        self.converged = converged
        self.epochs = epochs

    def scores(self, X: np.ndarray) -> np.ndarray:
        return softmax(X @ self.W + self.b)

    def state(self) -> dict:
        return {"W": self.W.tolist(), "b": self.b.tolist(), "converged": self.converged, "epochs": self.epochs}

    @classmethod
    def from_state(cls, s: dict) -> "LogisticModel":
        return cls(np.asarray(s["W"]), np.asarray(s["b"]), s.get("converged", True), s.get("epochs", 0))


def fit_logistic(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    weights: np.ndarray,
    C: float = 1.0,
    tol: float = 1e-6,
    max_epochs: int = 20_000,
) -> LogisticModel:
    """Nesterov-accelerated full-batch gradient descent with backtracking.

    Stops when the gradient norm falls below ``tol`` or after ``max_epochs``
    gradient evaluations.  Momentum restarts whenever the objective rises.
    """
    n, d = X.shape
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    obj = LogisticObjective(X, Y, np.asarray(weights, float), 1.0 / (C * float(np.sum(weights))))

    W = np.zeros((d, n_classes))
    b = np.zeros(n_classes)
    VW, Vb = W.copy(), b.copy()
    t = 1.0
    step = 1.0
    f_prev = obj.value(W, b)
    converged = False
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        gW, gb = obj.grad(VW, Vb)
        gnorm = np.sqrt((gW * gW).sum() + (gb * gb).sum())
        if gnorm < tol:
            W, b = VW, Vb
            converged = True
            break
        f_v = obj.value(VW, Vb)
        while True:
            W_new = VW - step * gW
            b_new = Vb - step * gb
            f_new = obj.value(W_new, b_new)
            if f_new <= f_v - 0.5 * step * gnorm * gnorm or step < 1e-20:
                break
            step *= 0.5
        if f_new > f_prev:
            # restart momentum from the last accepted iterate
            VW, Vb, t = W.copy(), b.copy(), 1.0
            continue
        t_new = (1 + np.sqrt(1 + 4 * t * t)) / 2
        mom = (t - 1) / t_new
        VW = W_new + mom * (W_new - W)
        Vb = b_new + mom * (b_new - b)
        W, b, t, f_prev = W_new, b_new, t_new, f_new
        step *= 1.5
    return LogisticModel(W, b, converged, epoch)
