"""CART decision trees (weighted Gini) and bagged random forests."""

from __future__ import annotations

import math

import numpy as np

from ..seeding import seed_derive
from .base import TrainedModel

LEAF = -1


def _n_candidate_features(max_features, d: int) -> int:
    if max_features is None:
        return d
    if max_features == "sqrt":
        return max(1, int(math.sqrt(d)))
    if max_features == "log2":
        return max(1, int(math.log2(d)))
    if isinstance(max_features, float):
        return max(1, int(max_features * d))
    return max(1, min(d, int(max_features)))


def _best_split(X: np.ndarray, W: np.ndarray, features: np.ndarray, n_wanted: int):
    """Search features in the given order for the best weighted-Gini split.

    ``W`` is the n x K matrix of per-row class weights.  Features that are
    constant within the node do not count towards ``n_wanted``, so the search
    continues until that many splittable features have been examined.
    Returns ``(feature, threshold)`` or ``None``.
    """
    best_score = -np.inf
    best = None
    examined = 0
    for f in features:
        if examined >= n_wanted:
            break
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        valid = xs[:-1] < xs[1:]
        if not valid.any():
            continue
        examined += 1
        cum = np.cumsum(W[order], axis=0)[:-1][valid]
        total = W.sum(axis=0)
        right = total - cum
        wl = cum.sum(axis=1)
        wr = right.sum(axis=1)
        ok = (wl > 0) & (wr > 0)
        if not ok.any():
            continue
        # minimising weighted child Gini == maximising sum(p^2 * w) per child
        score = np.full(len(wl), -np.inf)
        score[ok] = (cum[ok] ** 2).sum(axis=1) / wl[ok] + (right[ok] ** 2).sum(axis=1) / wr[ok]
        pos = int(np.argmax(score))
        if score[pos] > best_score + 1e-12:
            best_score = score[pos]
            cut = np.flatnonzero(valid)[pos]
            best = (int(f), float((xs[cut] + xs[cut + 1]) / 2))
    return best


class TreeModel(TrainedModel):
    """Array-encoded binary tree; ``value`` rows hold weighted class mass per node."""

    kind = "decision_tree"

    def __init__(self, feature, threshold, left, right, value, n_features: int):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)
        self.n_features = n_features
        self.n_classes = self.value.shape[1]

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            idx = np.flatnonzero(active)
            n = node[idx]
            go_left = X[idx, self.feature[n]] <= self.threshold[n]
            node[idx] = np.where(go_left, self.left[n], self.right[n])
            active[idx] = self.feature[node[idx]] != LEAF
        return node

    def scores(self, X: np.ndarray) -> np.ndarray:
        v = self.value[self.apply(X)]
        return v / v.sum(axis=1, keepdims=True)

    def state(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_features": self.n_features,
        }

    @classmethod
    def from_state(cls, s: dict) -> "TreeModel":
        return cls(s["feature"], s["threshold"], s["left"], s["right"], s["value"], s["n_features"])


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    weights: np.ndarray,
    seed: int,
    max_depth: int | None = None,
    max_features=None,
    min_samples_split: int = 2,
) -> TreeModel:
    """Grow an unpruned CART tree on rows with positive weight."""
    keep = weights > 0
    X, y, weights = X[keep], y[keep], weights[keep]
    d = X.shape[1]
    n_wanted = _n_candidate_features(max_features, d)
    rng = np.random.default_rng(seed)
    W = np.zeros((len(y), n_classes))
    W[np.arange(len(y)), y] = weights

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(W[rows].sum(axis=0))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)), 0)]
    while stack:
        node, rows, depth = stack.pop()
        mass = value[node]
        if (
            len(rows) < min_samples_split
            or np.count_nonzero(mass) <= 1
            or (max_depth is not None and depth >= max_depth)
        ):
            continue
        order = rng.permutation(d)
        split = _best_split(X[rows], W[rows], order, n_wanted)
        if split is None:
            continue
        f, t = split
        go_left = X[rows, f] <= t
        lrows, rrows = rows[go_left], rows[~go_left]
        feature[node], threshold[node] = f, t
        left[node] = new_node(lrows)
        right[node] = new_node(rrows)
        stack.append((right[node], rrows, depth + 1))
        stack.append((left[node], lrows, depth + 1))
    return TreeModel(feature, threshold, left, right, np.array(value), d)


class ForestModel(TrainedModel):
    """Bagged trees combined by plurality vote (ties to the lower class)."""

    kind = "random_forest"

    def __init__(self, trees: list[TreeModel], n_classes: int, n_features: int):
        self.trees = trees
        self.n_classes = n_classes
        self.n_features = n_features

    def scores(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros((len(X), self.n_classes))
        rows = np.arange(len(X))
        for t in self.trees:
            votes[rows, np.argmax(t.scores(X), axis=1)] += 1
        return votes / len(self.trees)

    def state(self) -> dict:
        return {"trees": [t.state() for t in self.trees], "n_classes": self.n_classes, "n_features": self.n_features}

    @classmethod
    def from_state(cls, s: dict) -> "ForestModel":
        return cls([TreeModel.from_state(t) for t in s["trees"]], s["n_classes"], s["n_features"])


def grow_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    weights: np.ndarray,
    seed: int,
    n_estimators: int = 100,
    max_depth: int | None = None,
    max_features="sqrt",
    bootstrap: bool = True,
) -> ForestModel:
    trees = []
    n = len(y)
    for t in range(n_estimators):
        rng = np.random.default_rng(seed_derive(seed, "bootstrap", t))
        if bootstrap:
            counts = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(float)
        else:
            counts = np.ones(n)
        trees.append(
            grow_tree(X, y, n_classes, weights * counts, seed_derive(seed, "tree", t), max_depth, max_features)
        )
    return ForestModel(trees, n_classes, X.shape[1])
