"""SMOTE and its seed-selection variants (Borderline-1, ADASYN, SVM-SMOTE)."""

from __future__ import annotations

import numpy as np

from ..models import svm
from ..neighbors import kneighbors
from ..tabular import Dataset
from .base import (
    INTERPOLATING,
    FittedGenerator,
    GenerationInfeasible,
    GeneratorKind,
    GeneratorSpec,
    SpecError,
    effective_k,
    preflight,
)


class SmoteGenerator(FittedGenerator):
    """Interpolating generator over a stored minority matrix.

    ``seeds`` indexes rows of ``minority`` that may start an interpolation,
    drawn with probability ``seed_probs``.  Each synthetic point is
    ``x_seed + lam * (x_nbr - x_seed)`` with ``x_nbr`` one of the seed's
    ``k`` minority neighbours and ``lam = lo + (hi - lo) * U``, ``U ~ [0, 1)``.
    """

    def __init__(
        self,
        spec: GeneratorSpec,
        class_label: int,
        schema: Dataset,
        minority: np.ndarray,
        neighbors: np.ndarray,
        seeds: np.ndarray,
        seed_probs: np.ndarray,
        step_lo: np.ndarray,
        step_hi: np.ndarray,
        fold_id: int = -1,
    ):
        super().__init__(spec, class_label, schema, fold_id)
        self.minority = minority
        self.neighbors = neighbors
        self.seeds = seeds
        self.seed_probs = seed_probs
        self.step_lo = step_lo
        self.step_hi = step_hi

    def draw(self, n: int, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (seed row, neighbour row, synthetic rows) index/value triples."""
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(self.seeds), size=n, p=self.seed_probs)
        src = self.seeds[pick]
        nbr = self.neighbors[src, rng.integers(self.neighbors.shape[1], size=n)]
        u = rng.random(n)
        lam = self.step_lo[pick] + (self.step_hi[pick] - self.step_lo[pick]) * u
        base = self.minority[src]
        rows = base + lam[:, None] * (self.minority[nbr] - base)
        return src, nbr, rows

    def sample_matrix(self, n: int, seed: int) -> np.ndarray:
        return self.draw(n, seed)[2]


def _other_fraction(fold: Dataset, target: int, members: np.ndarray, m: int) -> np.ndarray:
    """Fraction of each member's ``m`` whole-fold neighbours with a different label."""
    nn = kneighbors(fold.X[members], fold.X, m + 1)
    out = np.empty(len(members))
    for row, (i, cand) in enumerate(zip(members, nn)):
        cand = cand[cand != i][:m]
        out[row] = np.mean(fold.y[cand] != target)
    return out


def fit_smote_variant(
    spec: GeneratorSpec,
    fold: Dataset,
    target_class: int,
    fold_id: int = -1,
) -> SmoteGenerator:
    """Fit one of SMOTE / Borderline-SMOTE / ADASYN / SVM-SMOTE for ``target_class``.

    ``fold`` is the whole training fold: the variants other than plain SMOTE
    look at other-class neighbours to decide where to seed.
    """
    if spec.kind not in INTERPOLATING:
        raise SpecError(f"{spec.kind.value} is not an interpolating SMOTE variant")
    members = np.flatnonzero(fold.y == target_class)
    n_k = len(members)
    feas = preflight(spec, n_k)
    if not feas:
        raise GenerationInfeasible(feas.reason)
    k = effective_k(spec, n_k)
    minority = fold.X[members]
    neighbors = kneighbors(minority, minority, k, exclude_self=True)
    n_other = len(fold) - n_k
    if spec.kind is not GeneratorKind.SMOTE and n_other == 0:
        raise GenerationInfeasible(f"{spec.kind.value} needs at least one non-target sample in the fold")

    seeds = np.arange(n_k)
    probs = np.full(n_k, 1.0 / n_k)
    lo = np.zeros(n_k)
    hi = np.ones(n_k)

    if spec.kind is GeneratorKind.BORDERLINE_SMOTE:
        m = min(spec.m_neighbors, len(fold) - 1)
        frac = _other_fraction(fold, target_class, members, m)
        n_bad = frac * m
        danger = (2 * n_bad > m) & (n_bad < m)
        if not danger.any():
            raise GenerationInfeasible("borderline_smote: no danger points")
        seeds = np.flatnonzero(danger)
        probs = np.full(len(seeds), 1.0 / len(seeds))
        lo, hi = lo[seeds], hi[seeds]

    elif spec.kind is GeneratorKind.ADASYN:
        kk = min(spec.k_neighbors, len(fold) - 1)
        r = _other_fraction(fold, target_class, members, kk)
        if r.sum() == 0:
            raise GenerationInfeasible("adasyn: no target sample has other-class neighbours")
        probs = r / r.sum()

    elif spec.kind is GeneratorKind.SVM_SMOTE:
        y_pm = np.where(fold.y == target_class, 1.0, -1.0)
        model = svm.fit_binary(fold.X, y_pm, C=1.0, kernel="linear")
        sv_rows = model.support_index[fold.y[model.support_index] == target_class]
        if sv_rows.size == 0:
            raise GenerationInfeasible("svm_smote: no target-class support vectors")
        # map fold rows back to minority positions
        position = {int(row): p for p, row in enumerate(members)}
        sv = np.array([position[int(r)] for r in sv_rows])
        m = min(spec.m_neighbors, len(fold) - 1)
        frac = _other_fraction(fold, target_class, members[sv], m)
        n_bad = frac * m
        keep = n_bad < m  # all-other neighbourhoods are treated as noise
        if not keep.any():
            raise GenerationInfeasible("svm_smote: every support vector is noise")
        sv, n_bad = sv[keep], n_bad[keep]
        danger = 2 * n_bad > m
        seeds = sv
        probs = np.full(len(sv), 1.0 / len(sv))
        lo = np.zeros(len(sv))
        # safe support vectors extrapolate away from their neighbour
        hi = np.where(danger, 1.0, -spec.out_step)

    return SmoteGenerator(spec, target_class, fold, minority, neighbors, seeds, probs, lo, hi, fold_id)
