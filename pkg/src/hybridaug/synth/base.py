"""Generator specifications, preflight feasibility and the fitted-generator base."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

import numpy as np

from ..tabular import Dataset


class GeneratorKind(str, Enum):
    SMOTE = "smote"
    BORDERLINE_SMOTE = "borderline_smote"
    ADASYN = "adasyn"
    SVM_SMOTE = "svm_smote"
    SMOTE_ENN = "smote_enn"
    SMOTE_TOMEK = "smote_tomek"
    GAUSSIAN_COPULA = "gaussian_copula"
    PLUGIN = "plugin"


SMOTE_FAMILY = {
    GeneratorKind.SMOTE,
    GeneratorKind.BORDERLINE_SMOTE,
    GeneratorKind.ADASYN,
    GeneratorKind.SVM_SMOTE,
    GeneratorKind.SMOTE_ENN,
    GeneratorKind.SMOTE_TOMEK,
}
INTERPOLATING = SMOTE_FAMILY - {GeneratorKind.SMOTE_ENN, GeneratorKind.SMOTE_TOMEK}
CLEANING = {GeneratorKind.SMOTE_ENN, GeneratorKind.SMOTE_TOMEK}


class SpecError(ValueError):
    pass


class GenerationInfeasible(RuntimeError):
    """A generator could not produce samples for a class (e.g. no danger points)."""


@dataclass(frozen=True)
class GeneratorSpec:
    """Which synthesizer to use and its parameters.

    ``k_neighbors`` is the interpolation neighbourhood of the SMOTE family
    (ADASYN's density neighbourhood too), ``m_neighbors`` the whole-fold
    neighbourhood Borderline-SMOTE and SVM-SMOTE use to classify seeds,
    ``enn_neighbors`` the ENN editing neighbourhood, and ``min_samples`` the
    copula's preflight floor.  ``plugin`` names an external generator.
    """

    kind: GeneratorKind
    k_neighbors: int = 5
    m_neighbors: int = 10
    enn_neighbors: int = 3
    min_samples: int = 10
    out_step: float = 0.5
    plugin: str | None = None
    options: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", GeneratorKind(self.kind))
        if self.k_neighbors < 1 or self.m_neighbors < 1 or self.enn_neighbors < 1:
            raise SpecError("neighbour counts must be >= 1")
        if self.min_samples < 2:
            raise SpecError("min_samples must be >= 2")
        if self.kind is GeneratorKind.PLUGIN and not self.plugin:
            raise SpecError("plugin generator needs a plugin name")

    @property
    def generator_id(self) -> str:
        if self.kind is GeneratorKind.PLUGIN:
            return f"plugin:{self.plugin}"
        return self.kind.value

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind.value}
        if self.kind in SMOTE_FAMILY:
            out["k_neighbors"] = self.k_neighbors
        if self.kind in (GeneratorKind.BORDERLINE_SMOTE, GeneratorKind.SVM_SMOTE):
            out["m_neighbors"] = self.m_neighbors
        if self.kind is GeneratorKind.SVM_SMOTE:
            out["out_step"] = self.out_step
        if self.kind is GeneratorKind.SMOTE_ENN:
            out["enn_neighbors"] = self.enn_neighbors
        if self.kind is GeneratorKind.GAUSSIAN_COPULA:
            out["min_samples"] = self.min_samples
        if self.kind is GeneratorKind.PLUGIN:
            out["plugin"] = self.plugin
            out["options"] = dict(self.options)
        return out


def smote(**kw) -> GeneratorSpec:
    return GeneratorSpec(GeneratorKind.SMOTE, **kw)


def gaussian_copula(**kw) -> GeneratorSpec:
    return GeneratorSpec(GeneratorKind.GAUSSIAN_COPULA, **kw)


def plugin(name: str, **kw) -> GeneratorSpec:
    return GeneratorSpec(GeneratorKind.PLUGIN, plugin=name, **kw)


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    reason: str = ""
    effective_k: int | None = None

    def __bool__(self) -> bool:
        return self.feasible


def effective_k(spec: GeneratorSpec, n_k: int) -> int:
    return min(spec.k_neighbors, n_k - 1)


def preflight(spec: GeneratorSpec, class_count: int, plugins: Mapping | None = None) -> Feasibility:
    """Check a generator's minimum-sample requirement for one class.

    Infeasibility is returned as a value; callers decide whether to fail.
    """
    if spec.kind is GeneratorKind.GAUSSIAN_COPULA:
        if class_count < spec.min_samples:
            return Feasibility(False, f"below min_samples={spec.min_samples}")
        return Feasibility(True)
    if spec.kind in SMOTE_FAMILY:
        if class_count < 2:
            return Feasibility(False, f"needs at least 2 samples for a neighbour, has {class_count}")
        return Feasibility(True, effective_k=effective_k(spec, class_count))
    if spec.kind is GeneratorKind.PLUGIN:
        if not plugins or spec.plugin not in plugins:
            return Feasibility(False, f"plugin {spec.plugin!r} not available")
        if class_count < 1:
            return Feasibility(False, "no rows to fit")
        return Feasibility(True)
    raise SpecError(f"unhandled generator kind {spec.kind}")


class FittedGenerator:
    """Per-class fitted synthesizer.  Subclasses implement :meth:`sample_matrix`."""

    def __init__(self, spec: GeneratorSpec, class_label: int, schema: Dataset, fold_id: int = -1):
        self.spec = spec
        self.class_label = class_label
        self.fold_id = fold_id
        self._schema = schema.empty_like()

    @property
    def generator_id(self) -> str:
        return self.spec.generator_id

    def sample_matrix(self, n: int, seed: int) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def sample(self, n: int, seed: int) -> Dataset:
        """Draw ``n`` synthetic rows labelled with this generator's class."""
        if n < 0:
            raise ValueError("n must be non-negative")
        if n == 0:
            return self._schema
        rows = self.sample_matrix(n, seed)
        return self._schema.with_rows(rows, np.full(n, self.class_label), self.generator_id, self.fold_id)
