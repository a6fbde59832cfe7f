"""Class-dependent augmentation policy and growth-mode volume control."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .seeding import seed_derive
from .synth import (
    CLEANING,
    GenerationInfeasible,
    GeneratorKind,
    GeneratorSpec,
    PluginConfig,
    clean_resample,
    fit_generator,
    gaussian_copula,
    plugin,
    preflight,
)
from .tabular import Dataset

DEFAULT_TAU = 29


@dataclass(frozen=True)
class Balance:
    """Grow every class to the fold's majority count."""

    @property
    def label(self) -> str:
        return "balance"


@dataclass(frozen=True)
class Proportional:
    """Multiply every class by ``factor``."""

    factor: int = 2

    def __post_init__(self):
        if int(self.factor) != self.factor or self.factor < 2:
            raise ValueError("proportional factor must be an integer >= 2")

    @property
    def label(self) -> str:
        return f"proportional_x{self.factor}"


GrowthMode = Union[Balance, Proportional]


def parse_growth(text: str | GrowthMode) -> GrowthMode:
    """Parse ``balance``, ``proportional:4``, ``proportional_x4`` or ``x4``."""
    if isinstance(text, (Balance, Proportional)):
        return text
    t = str(text).strip().lower()
    if t == "balance":
        return Balance()
    for prefix in ("proportional:", "proportional_x", "proportionalx", "x"):
        if t.startswith(prefix):
            return Proportional(int(t[len(prefix):]))
    raise ValueError(f"unknown growth mode {text!r}")


@dataclass(frozen=True)
class PolicySpec:
    """Threshold policy: classes below ``tau`` use ``small``, the rest ``large``.

    When ``large`` is a plug-in that is not configured, ``large_fallback`` is
    used instead and the substitution is recorded in the audit trail.  Set it
    to ``None`` to make a missing plug-in a failure.
    """

    tau: int = DEFAULT_TAU
    small: GeneratorSpec = field(default_factory=gaussian_copula)
    large: GeneratorSpec = field(default_factory=lambda: plugin("ctgan"))
    growth: GrowthMode = field(default_factory=Balance)
    large_fallback: GeneratorSpec | None = field(default_factory=gaussian_copula)

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError("tau must be >= 1")

    @property
    def label(self) -> str:
        return f"hybrid_{self.growth.label}"


@dataclass(frozen=True)
class SingleAugmentation:
    """One generator for every class, with a growth mode."""

    generator: GeneratorSpec
    growth: GrowthMode = field(default_factory=Balance)

    @property
    def label(self) -> str:
        g = self.generator.generator_id
        return g if isinstance(self.growth, Balance) else f"{g}_{self.growth.label}"


Augmentation = Union[PolicySpec, SingleAugmentation]


@dataclass
class PolicyFailure(Exception):
    """Augmentation could not run; one ``(class name, reason)`` entry per problem."""

    failures: list[tuple[str, str]]

    def __str__(self) -> str:
        return "; ".join(f"{c}: {r}" for c, r in self.failures)


@dataclass(frozen=True)
class ClassAssignment:
    class_name: str
    real: int
    synthetic: int
    generator: str | None
    fallback: bool = False

    def to_json(self) -> dict:
        return {
            "class": self.class_name,
            "real": self.real,
            "synthetic": self.synthetic,
            "generator": self.generator,
            "fallback": self.fallback,
        }


@dataclass(frozen=True)
class AugmentResult:
    dataset: Dataset
    assignments: tuple[ClassAssignment, ...]


def assign_generators(class_counts: Sequence[int], policy: PolicySpec) -> list[GeneratorSpec]:
    """Pick ``small`` for classes with ``n_k < tau`` and ``large`` otherwise."""
    if len(class_counts) == 0:
        raise ValueError("class_counts must be non-empty")
    return [policy.small if n < policy.tau else policy.large for n in class_counts]


def compute_targets(class_counts: Sequence[int], growth: GrowthMode) -> np.ndarray:
    """Synthetic rows to add per class.

    Balance tops every class up to the largest count (the majority gets none);
    proportional ``m`` adds ``(m - 1) * n_k``.
    """
    counts = np.asarray(class_counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("class_counts must be non-empty")
    if isinstance(growth, Balance):
        return counts.max() - counts
    return (growth.factor - 1) * counts


def _resolve(spec: GeneratorSpec, fallback: GeneratorSpec | None, plugins) -> tuple[GeneratorSpec, bool]:
    if spec.kind is GeneratorKind.PLUGIN and (not plugins or spec.plugin not in plugins) and fallback is not None:
        return fallback, True
    return spec, False


def _plan(augmentation: Augmentation, counts: np.ndarray, plugins) -> list[tuple[GeneratorSpec, bool]]:
    if isinstance(augmentation, PolicySpec):
        specs = assign_generators(counts, augmentation)
        return [
            (s, False) if n < augmentation.tau else _resolve(s, augmentation.large_fallback, plugins)
            for s, n in zip(specs, counts)
        ]
    return [(augmentation.generator, False)] * len(counts)


def augment(
    fold_train: Dataset,
    augmentation: Augmentation,
    seed: int,
    fold_id: int = -1,
    plugins: Mapping[str, PluginConfig] | None = None,
) -> AugmentResult:
    """Apply ``augmentation`` to one training fold.

    Every class that needs synthetic rows is preflighted first; any
    infeasibility raises :class:`PolicyFailure` with nothing generated and no
    substitute generator tried.  Real rows are kept in their original order,
    followed by synthetic rows class by class.
    """
    if len(fold_train) == 0:
        raise ValueError("training fold is empty")
    counts = fold_train.class_counts
    targets = compute_targets(counts, augmentation.growth)
    plan = _plan(augmentation, counts, plugins)
    names = fold_train.label_vocab

    failures = []
    for c, (spec, _) in enumerate(plan):
        if targets[c] == 0 or counts[c] == 0:
            continue
        feas = preflight(spec, int(counts[c]), plugins)
        if not feas:
            failures.append((names[c], feas.reason))
    if failures:
        raise PolicyFailure(failures)

    assignments = tuple(
        ClassAssignment(
            names[c],
            int(counts[c]),
            int(targets[c]) if counts[c] else 0,
            plan[c][0].generator_id if targets[c] and counts[c] else None,
            plan[c][1] and bool(targets[c]),
        )
        for c in range(len(counts))
    )

    if isinstance(augmentation, SingleAugmentation) and augmentation.generator.kind in CLEANING:
        try:
            out = clean_resample(augmentation.generator, fold_train, targets, seed_derive(seed, "clean", fold_id), fold_id)
        except GenerationInfeasible as exc:
            raise PolicyFailure([("*", str(exc))]) from None
        return AugmentResult(out, assignments)

    parts = [fold_train]
    for c, (spec, _) in enumerate(plan):
        s = int(targets[c])
        if s == 0 or counts[c] == 0:
            continue
        try:
            gen = fit_generator(spec, fold_train, c, fold_id, plugins)
            parts.append(gen.sample(s, seed_derive(seed, "generate", fold_id, c)))
        except GenerationInfeasible as exc:
            failures.append((names[c], str(exc)))
    if failures:
        raise PolicyFailure(failures)
    return AugmentResult(Dataset.concat(parts), assignments)


def apply_policy(
    fold_train: Dataset,
    policy: PolicySpec,
    seed: int,
    fold_id: int = -1,
    plugins: Mapping[str, PluginConfig] | None = None,
) -> Dataset:
    return augment(fold_train, policy, seed, fold_id, plugins).dataset
