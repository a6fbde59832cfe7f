"""SMOTE followed by ENN editing or Tomek-link removal."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..neighbors import kneighbors
from ..seeding import seed_derive
from ..tabular import Dataset
from .base import CLEANING, GenerationInfeasible, GeneratorKind, GeneratorSpec, SpecError, preflight
from .interpolation import fit_smote_variant


def enn_mask(X: np.ndarray, y: np.ndarray, n_neighbors: int = 3) -> np.ndarray:
    """Rows to keep: a row is dropped when most of its neighbours carry another label."""
    k = min(n_neighbors, len(y) - 1)
    if k < 1:
        return np.ones(len(y), dtype=bool)
    nn = kneighbors(X, X, k, exclude_self=True)
    n_other = (y[nn] != y[:, None]).sum(axis=1)
    return ~(2 * n_other > k)


def tomek_links(X: np.ndarray, y: np.ndarray) -> list[tuple[int, int]]:
    """Pairs ``(i, j)``, ``i < j``, that are mutual nearest neighbours with different labels."""
    if len(y) < 2:
        return []
    nn = kneighbors(X, X, 1, exclude_self=True)[:, 0]
    return [(i, int(j)) for i, j in enumerate(nn) if i < j and nn[j] == i and y[i] != y[j]]


def class_rank(real_counts: np.ndarray, total_counts: np.ndarray) -> np.ndarray:
    """Sort key making the 'majority' class of a pair well defined.

    Larger real count wins, then larger total count, then the lower class
    index.
    """
    K = len(real_counts)
    return np.array([(real_counts[c], total_counts[c], K - c) for c in range(K)], dtype=object)


def tomek_mask(X: np.ndarray, y: np.ndarray, real_counts: np.ndarray) -> np.ndarray:
    totals = np.bincount(y, minlength=len(real_counts))
    rank = class_rank(real_counts, totals)
    keep = np.ones(len(y), dtype=bool)
    for i, j in tomek_links(X, y):
        keep[i if tuple(rank[y[i]]) > tuple(rank[y[j]]) else j] = False
    return keep


def clean_resample(
    spec: GeneratorSpec,
    fold: Dataset,
    targets: Sequence[int],
    seed: int,
    fold_id: int = -1,
) -> Dataset:
    """Oversample each class with SMOTE to its requested count, then clean.

    ``targets[c]`` is the number of synthetic rows requested for class ``c``.
    Surviving rows keep their provenance; a class emptied by cleaning is a
    failure.
    """
    if spec.kind not in CLEANING:
        raise SpecError(f"{spec.kind.value} is not a cleaning variant")
    base = GeneratorSpec(GeneratorKind.SMOTE, k_neighbors=spec.k_neighbors)
    counts = fold.class_counts
    parts = [fold]
    for c, s in enumerate(targets):
        if s <= 0:
            continue
        feas = preflight(base, int(counts[c]))
        if not feas:
            raise GenerationInfeasible(f"class {fold.label_vocab[c]!r}: {feas.reason}")
        gen = fit_smote_variant(base, fold, c, fold_id)
        rows = gen.sample_matrix(int(s), seed_derive(seed, "smote", c))
        parts.append(fold.empty_like().with_rows(rows, np.full(int(s), c), spec.generator_id, fold_id))
    pooled = Dataset.concat(parts)
    if spec.kind is GeneratorKind.SMOTE_ENN:
        keep = enn_mask(pooled.X, pooled.y, spec.enn_neighbors)
    else:
        keep = tomek_mask(pooled.X, pooled.y, counts)
    out = pooled.subset(np.flatnonzero(keep))
    before = pooled.class_counts
    after = out.class_counts
    for c in range(fold.n_classes):
        if before[c] > 0 and after[c] == 0:
            raise GenerationInfeasible(f"cleaning removed every sample of class {fold.label_vocab[c]!r}")
    return out
