"""Feed-forward ReLU network on standardised inputs, trained with mini-batch SGD."""

from __future__ import annotations

import numpy as np

from ..seeding import seed_derive
from .base import TrainedModel
from .linear import log_softmax, softmax


def init_params(sizes: list[int], rng: np.random.Generator) -> list[np.ndarray]:
    """He-normal weights and zero biases, flattened as ``[W1, b1, W2, b2, ...]``."""
    params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        params.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def forward(params, X, dropout: float = 0.0, rng: np.random.Generator | None = None):
    """Return logits and the activations/masks needed by :func:`backward`."""
    acts = [X]
    masks = []
    h = X
    n_layers = len(params) // 2
    for layer in range(n_layers):
        W, b = params[2 * layer], params[2 * layer + 1]
        z = h @ W + b
        if layer == n_layers - 1:
            return z, (acts, masks)
        h = np.maximum(z, 0.0)
        if dropout > 0 and rng is not None:
            keep = (rng.random(h.shape) >= dropout) / (1.0 - dropout)
            h = h * keep
        else:
            keep = None
        masks.append((z > 0, keep))
        acts.append(h)
    raise ValueError("network has no layers")


def loss_and_grad(params, X, Y, w, dropout=0.0, rng=None):
    """Weighted mean cross-entropy and its gradient with respect to ``params``."""
    logits, (acts, masks) = forward(params, X, dropout, rng)
    wn = w / w.sum()
    loss = float(-(wn * (Y * log_softmax(logits)).sum(axis=1)).sum())
    delta = (softmax(logits) - Y) * wn[:, None]
    grads = [None] * len(params)
    n_layers = len(params) // 2
    for layer in range(n_layers - 1, -1, -1):
        grads[2 * layer] = acts[layer].T @ delta
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer > 0:
            delta = delta @ params[2 * layer].T
            active, keep = masks[layer - 1]
            if keep is not None:
                delta = delta * keep
            delta = delta * active
    return loss, grads


class MlpModel(TrainedModel):
    kind = "mlp"

    def __init__(self, params, mean, scale):
        self.params = [np.asarray(p, dtype=np.float64) for p in params]
        self.mean = np.asarray(mean, dtype=np.float64)
        self.scale = np.asarray(scale, dtype=np.float64)
        self.n_features = self.params[0].shape[0]
        self.n_classes = self.params[-1].shape[0]

    def logits(self, X: np.ndarray) -> np.ndarray:
        return forward(self.params, (X - self.mean) / self.scale)[0]

    def scores(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.logits(X))

    def state(self) -> dict:
        return {"params": [p.tolist() for p in self.params], "mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_state(cls, s: dict) -> "MlpModel":
        return cls(s["params"], s["mean"], s["scale"])


def fit_mlp(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    weights: np.ndarray,
    seed: int,
    layers=(256, 128),
    dropout: float = 0.2,
    learning_rate: float = 0.01,
    batch_size: int = 32,
    max_epochs: int = 100,
) -> MlpModel:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Xs = (X - mean) / scale
    n = len(y)
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    params = init_params([X.shape[1], *layers, n_classes], np.random.default_rng(seed_derive(seed, "mlp_init")))
    for epoch in range(max_epochs):
        rng = np.random.default_rng(seed_derive(seed, "mlp_epoch", epoch))
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            _, grads = loss_and_grad(params, Xs[idx], Y[idx], weights[idx], dropout, rng)
            for p, g in zip(params, grads):
                p -= learning_rate * g
    return MlpModel(params, mean, scale)
