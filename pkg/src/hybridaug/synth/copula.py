"""Gaussian copula with empirical marginals."""

from __future__ import annotations

import numpy as np
from scipy import stats

from ..tabular import Dataset
from .base import FittedGenerator, GenerationInfeasible, GeneratorKind, GeneratorSpec, SpecError


def normal_scores(col: np.ndarray) -> np.ndarray:
    """Mid-rank normal scores ``Phi^-1((rank - 0.5) / n)`` with average ranks for ties."""
    n = len(col)
    return stats.norm.ppf((stats.rankdata(col, method="average") - 0.5) / n)


def repair_correlation(R: np.ndarray) -> np.ndarray:
    """Project a symmetric matrix to a PSD correlation matrix.

    Negative eigenvalues are clipped to zero and the result is rescaled to a
    unit diagonal.
    """
    R = (R + R.T) / 2
    vals, vecs = np.linalg.eigh(R)
    if vals.min() >= 0:
        out = R.copy()
    else:
        out = (vecs * np.clip(vals, 0, None)) @ vecs.T
    d = np.sqrt(np.clip(np.diag(out), 1e-300, None))
    out = out / d[:, None] / d[None, :]
    out = np.clip((out + out.T) / 2, -1.0, 1.0)
    np.fill_diagonal(out, 1.0)
    return out


def fitted_correlation(rows: np.ndarray) -> np.ndarray:
    """Normal-score Pearson correlation; constant columns get zero correlation."""
    n, d = rows.shape
    Z = np.column_stack([normal_scores(rows[:, j]) for j in range(d)])
    constant = np.all(rows == rows[0], axis=0)
    R = np.eye(d)
    live = np.flatnonzero(~constant)
    if len(live) > 1:
        R[np.ix_(live, live)] = np.corrcoef(Z[:, live], rowvar=False)
    return repair_correlation(R)


class GaussianCopulaGenerator(FittedGenerator):
    def __init__(self, spec, class_label, schema, sorted_cols, integer_mask, corr, fold_id=-1):
        super().__init__(spec, class_label, schema, fold_id)
        self.sorted_cols = sorted_cols  # n_k x d, each column ascending
        self.integer_mask = integer_mask
        self.observed = [np.unique(sorted_cols[:, j]) for j in range(sorted_cols.shape[1])]
        self.corr = corr
        vals, vecs = np.linalg.eigh(corr)
        self._factor = vecs * np.sqrt(np.clip(vals, 0, None))

    @property
    def n_train(self) -> int:
        return self.sorted_cols.shape[0]

    def inverse_cdf(self, j: int, u: np.ndarray) -> np.ndarray:
        """Empirical quantile with linear interpolation between order statistics.

        The i-th order statistic sits at probability ``(i - 0.5) / n``,
        matching the mid-rank transform used when fitting.
        """
        n = self.n_train
        probs = (np.arange(1, n + 1) - 0.5) / n
        return np.interp(u, probs, self.sorted_cols[:, j])

    def sample_matrix(self, n: int, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        d = self.corr.shape[0]
        z = rng.standard_normal((n, d)) @ self._factor.T
        u = stats.norm.cdf(z)
        out = np.empty((n, d))
        for j in range(d):
            col = self.inverse_cdf(j, u[:, j])
            if self.integer_mask[j]:
                col = _snap(col, self.observed[j])
            out[:, j] = col
        return out


def _snap(values: np.ndarray, observed: np.ndarray) -> np.ndarray:
    """Round each value to the nearest observed value (lower on exact ties)."""
    if len(observed) == 1:
        return np.full_like(values, observed[0])
    pos = np.clip(np.searchsorted(observed, values), 1, len(observed) - 1)
    left, right = observed[pos - 1], observed[pos]
    snapped = np.where(values - left <= right - values, left, right)
    return np.clip(snapped, observed[0], observed[-1])


def fit_gaussian_copula(
    class_rows: np.ndarray,
    spec: GeneratorSpec | None = None,
    *,
    class_label: int = 0,
    schema: Dataset | None = None,
    fold_id: int = -1,
) -> GaussianCopulaGenerator:
    """Fit per-column empirical marginals and a normal-score correlation matrix."""
    spec = spec or GeneratorSpec(GeneratorKind.GAUSSIAN_COPULA)
    if spec.kind is not GeneratorKind.GAUSSIAN_COPULA:
        raise SpecError("spec is not a gaussian_copula spec")
    rows = np.asarray(class_rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] < 1:
        raise SpecError("class rows must be a non-empty n x d matrix")
    if rows.shape[0] < spec.min_samples:
        raise GenerationInfeasible(f"below min_samples={spec.min_samples}")
    if schema is None:
        d = rows.shape[1]
        schema = Dataset(np.empty((0, d)), np.empty(0, dtype=int), tuple(f"x{j}" for j in range(d)), ("class",))
    integer_mask = np.all(rows == np.round(rows), axis=0)
    return GaussianCopulaGenerator(
        spec,
        class_label,
        schema,
        np.sort(rows, axis=0),
        integer_mask,
        fitted_correlation(rows),
        fold_id,
    )
