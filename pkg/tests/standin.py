"""Migraine-shaped stand-in data for integration tests.

Same columns, class names and class sizes as the public migraine table, with
class-dependent integer features.  Values carry no clinical meaning; tests
use them to exercise the pipeline, never to check published numbers.
"""

from __future__ import annotations

import numpy as np

from hybridaug.reference import SEVEN_CLASS_COUNTS
from hybridaug.tabular import Dataset

FEATURES = (
    "Age", "Duration", "Frequency", "Location", "Character", "Intensity", "Nausea", "Vomit",
    "Phonophobia", "Photophobia", "Visual", "Sensory", "Dysphasia", "Dysarthria", "Vertigo",
    "Tinnitus", "Hypoacusis", "Diplopia", "Defect", "Ataxia", "Conscience", "Paresthesia", "DPF",
)
# upper bound of each integer feature
LEVELS = (70, 3, 8, 2, 2, 3, 1, 1, 1, 1, 4, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1)


def migraine_standin(seed: int = 0, counts: dict[str, int] | None = None) -> Dataset:
    counts = dict(SEVEN_CLASS_COUNTS if counts is None else counts)
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.15, 0.85, size=(len(counts), len(FEATURES)))
    X, y = [], []
    for c, n in enumerate(counts.values()):
        p = np.clip(centers[c] + rng.normal(0, 0.12, size=(n, len(FEATURES))), 0, 1)
        X.append(np.round(p * np.array(LEVELS)))
        y.append(np.full(n, c))
    X = np.vstack(X)
    y = np.concatenate(y)
    order = rng.permutation(len(y))
    X, y = X[order], y[order]
    # vocabulary in first-appearance order, as the CSV loader produces
    names = list(counts)
    first = list(dict.fromkeys(y.tolist()))
    remap = np.empty(len(names), dtype=int)
    remap[first] = np.arange(len(first))
    return Dataset(X, remap[y], FEATURES, tuple(names[c] for c in first))


def blobs(n_per: int, centers, scale: float = 0.3, seed: int = 0) -> Dataset:
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    X = np.vstack([c + scale * rng.standard_normal((n_per, centers.shape[1])) for c in centers])
    y = np.repeat(np.arange(len(centers)), n_per)
    names = tuple(f"f{j}" for j in range(centers.shape[1]))
    return Dataset(X, y, names, tuple(f"c{i}" for i in range(len(centers))))
