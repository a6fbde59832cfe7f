"""Two-class cohort comparisons: per-feature mean differences and the aggregation audit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import silhouette
from .tabular import Dataset, DatasetError


@dataclass(frozen=True)
class FeatureDiff:
    feature: str
    mean_a: float
    mean_b: float
    constant_a: bool
    constant_b: bool

    @property
    def abs_diff(self) -> float:
        return abs(self.mean_a - self.mean_b)

    def to_json(self) -> dict:
        return {"feature": self.feature, "mean_a": self.mean_a, "mean_b": self.mean_b, "abs_diff": self.abs_diff}


@dataclass(frozen=True)
class FeatureDiffTable:
    class_a: str
    class_b: str
    n_a: int
    n_b: int
    rows: tuple[FeatureDiff, ...]

    def row(self, feature: str) -> FeatureDiff:
        for r in self.rows:
            if r.feature == feature:
                return r
        raise KeyError(feature)

    def to_json(self) -> dict:
        return {
            "class_a": self.class_a,
            "class_b": self.class_b,
            "n_a": self.n_a,
            "n_b": self.n_b,
            "rows": [r.to_json() for r in self.rows],
        }

    def to_csv(self) -> str:
        lines = ["feature,mean_a,mean_b,abs_diff"]
        lines += [f"{r.feature},{r.mean_a:.3f},{r.mean_b:.3f},{r.abs_diff:.3f}" for r in self.rows]
        return "\n".join(lines) + "\n"


def _class_rows(ds: Dataset, name: str) -> np.ndarray:
    if name not in ds.label_vocab:
        raise DatasetError(f"class {name!r} not in dataset")
    rows = ds.X[ds.y == ds.label_index(name)]
    if len(rows) == 0:
        raise DatasetError(f"class {name!r} has no rows")
    return rows


def feature_mean_diffs(ds: Dataset, class_a: str, class_b: str, tol: float = 0.0) -> FeatureDiffTable:
    """Per-feature class means, ascending by absolute difference then name.

    ``tol`` is the spread below which a feature counts as constant within a
    class; the default 0 suits integer-coded data.
    """
    A = _class_rows(ds, class_a)
    B = _class_rows(ds, class_b)
    mean_a, mean_b = A.mean(axis=0), B.mean(axis=0)
    const_a = np.ptp(A, axis=0) <= tol
    const_b = np.ptp(B, axis=0) <= tol
    rows = [
        FeatureDiff(name, float(mean_a[j]), float(mean_b[j]), bool(const_a[j]), bool(const_b[j]))
        for j, name in enumerate(ds.feature_names)
    ]
    rows.sort(key=lambda r: (r.abs_diff, r.feature))
    return FeatureDiffTable(class_a, class_b, len(A), len(B), tuple(rows))


@dataclass(frozen=True)
class AggregationAudit:
    table: FeatureDiffTable
    threshold: float
    below_threshold: int
    constant_equal: tuple[str, ...]
    separators: tuple[str, ...]
    silhouette_means: dict

    def to_json(self) -> dict:
        return {
            "class_a": self.table.class_a,
            "class_b": self.table.class_b,
            "threshold": self.threshold,
            "below_threshold": self.below_threshold,
            "constant_equal": list(self.constant_equal),
            "n_constant_equal": len(self.constant_equal),
            "separators": list(self.separators),
            "silhouette_means": self.silhouette_means,
        }

    def summary(self) -> str:
        t = self.table
        lines = [
            f"{t.class_a} (n={t.n_a}) vs {t.class_b} (n={t.n_b})",
            f"features with |diff| < {self.threshold:g}: {self.below_threshold} of {len(t.rows)}",
            f"constant and equal in both classes: {len(self.constant_equal)}",
            f"separators: {', '.join(self.separators) or '-'}",
        ]
        lines += [f"silhouette mean, {c}: {s:+.3f}" for c, s in self.silhouette_means.items()]
        return "\n".join(lines)


def aggregation_audit(
    ds: Dataset, class_a: str, class_b: str, threshold: float = 0.3, tol: float = 0.0
) -> AggregationAudit:
    """Summarise how separable two classes are; all counts come from the diff table."""
    table = feature_mean_diffs(ds, class_a, class_b, tol)
    below = sum(r.abs_diff < threshold for r in table.rows)
    constant_equal = tuple(
        r.feature for r in table.rows if r.constant_a and r.constant_b and abs(r.mean_a - r.mean_b) <= tol
    )
    separators = tuple(r.feature for r in table.rows if r.abs_diff >= threshold)
    mask = (ds.y == ds.label_index(class_a)) | (ds.y == ds.label_index(class_b))
    names = np.asarray(ds.label_vocab, dtype=object)[ds.y[mask]]
    _, means = silhouette(ds.X[mask], names)
    return AggregationAudit(table, threshold, int(below), constant_equal, separators, means)
