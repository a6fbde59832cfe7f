from __future__ import annotations

import numpy as np

from ..neighbors import kneighbors
from .base import TrainedModel


class KnnModel(TrainedModel):
    """Uniform-vote k-nearest neighbours on Euclidean distance.

    Distance ties go to the lower training index; the score of a class is
    its vote share.
    """

    kind = "knn"

    def __init__(self, X: np.ndarray, y: np.ndarray, n_classes: int, n_neighbors: int = 5):
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        self.n_classes = n_classes
        self.n_features = self.X.shape[1]
        self.n_neighbors = min(n_neighbors, len(self.y))

    def scores(self, X: np.ndarray) -> np.ndarray:
        nn = kneighbors(X, self.X, self.n_neighbors)
        votes = np.zeros((len(X), self.n_classes))
        np.add.at(votes, (np.repeat(np.arange(len(X)), nn.shape[1]), self.y[nn].ravel()), 1.0)
        return votes / self.n_neighbors

    def state(self) -> dict:
        return {"X": self.X.tolist(), "y": self.y.tolist(), "n_classes": self.n_classes, "n_neighbors": self.n_neighbors}

    @classmethod
    def from_state(cls, state: dict) -> "KnnModel":
        return cls(np.asarray(state["X"]), np.asarray(state["y"]), state["n_classes"], state["n_neighbors"])
