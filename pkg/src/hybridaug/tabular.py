"""Tabular data model with row provenance, CSV ingestion and stratified folds."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .seeding import seed_derive

REAL = "real"


class DatasetError(ValueError):
    """Raised for malformed or degenerate tabular input."""


@dataclass(frozen=True)
class Provenance:
    """Where a row came from: the original file, or a generator fitted on a fold."""

    generator_id: str | None = None
    fold_id: int = -1

    @property
    def is_real(self) -> bool:
        return self.generator_id is None

    def to_json(self):
        if self.is_real:
            return REAL
        return {"generator": self.generator_id, "fold": self.fold_id}

    @classmethod
    def from_json(cls, obj) -> "Provenance":
        if obj == REAL:
            return cls()
        return cls(generator_id=str(obj["generator"]), fold_id=int(obj["fold"]))


@dataclass(frozen=True)
class Sample:
    features: np.ndarray
    label: int
    provenance: Provenance = Provenance()


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable labelled feature matrix.

    Rows are stored column-wise as arrays rather than a list of ``Sample``
    objects; ``samples`` materialises the per-row view on demand.  Provenance
    is kept as two parallel arrays: ``origin`` holds the generator id (``None``
    for real rows) and ``origin_fold`` the training fold the generator was
    fitted on (``-1`` for real rows or for generators fitted on the full set).
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    label_vocab: tuple[str, ...]
    origin: np.ndarray = field(default=None)  # type: ignore[assignment]
    origin_fold: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim == 1 and X.size == 0:
            X = X.reshape(0, len(self.feature_names))
        y = np.asarray(self.y, dtype=np.int64)
        n = len(y)
        if X.ndim != 2 or X.shape[0] != n:
            raise DatasetError(f"feature matrix shape {X.shape} does not match {n} labels")
        if X.shape[1] != len(self.feature_names):
            raise DatasetError(
                f"{X.shape[1]} feature columns but {len(self.feature_names)} feature names"
            )
        if n and (y.min() < 0 or y.max() >= len(self.label_vocab)):
            raise DatasetError("label index outside label vocabulary")
        origin = self.origin
        if origin is None:
            origin = np.full(n, None, dtype=object)
        origin = np.asarray(origin, dtype=object)
        origin_fold = self.origin_fold
        if origin_fold is None:
            origin_fold = np.full(n, -1, dtype=np.int64)
        origin_fold = np.asarray(origin_fold, dtype=np.int64)
        if len(origin) != n or len(origin_fold) != n:
            raise DatasetError("provenance arrays do not match row count")
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "origin", _frozen(origin))
        object.__setattr__(self, "origin_fold", _frozen(origin_fold))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "label_vocab", tuple(self.label_vocab))

    # -- basic shape -------------------------------------------------------
    @property
    def n_samples(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.label_vocab)

    def __len__(self) -> int:
        return self.n_samples

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    @property
    def is_real(self) -> np.ndarray:
        return np.array([o is None for o in self.origin], dtype=bool)

    @property
    def integer_columns(self) -> np.ndarray:
        """Boolean mask of columns whose observed values are all integral."""
        if self.n_samples == 0:
            return np.zeros(self.n_features, dtype=bool)
        return np.all(self.X == np.round(self.X), axis=0)

    def provenance(self, i: int) -> Provenance:
        if self.origin[i] is None:
            return Provenance()
        return Provenance(self.origin[i], int(self.origin_fold[i]))

    @property
    def samples(self) -> list[Sample]:
        return [Sample(self.X[i], int(self.y[i]), self.provenance(i)) for i in range(len(self))]

    def label_index(self, name: str) -> int:
        try:
            return self.label_vocab.index(name)
        except ValueError:
            raise DatasetError(f"unknown class {name!r}") from None

    # -- derivation --------------------------------------------------------
    def subset(self, indices: Sequence[int] | np.ndarray) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.X[idx],
            self.y[idx],
            self.feature_names,
            self.label_vocab,
            self.origin[idx],
            self.origin_fold[idx],
        )

    def with_rows(self, X: np.ndarray, y: np.ndarray, generator_id: str, fold_id: int = -1) -> "Dataset":
        """Return a new dataset with synthetic rows appended after the existing ones."""
        X = np.asarray(X, dtype=np.float64).reshape(-1, self.n_features)
        extra = len(X)
        return Dataset(
            np.vstack([self.X, X]),
            np.concatenate([self.y, np.asarray(y, dtype=np.int64)]),
            self.feature_names,
            self.label_vocab,
            np.concatenate([self.origin, np.full(extra, generator_id, dtype=object)]),
            np.concatenate([self.origin_fold, np.full(extra, fold_id, dtype=np.int64)]),
        )

    @classmethod
    def concat(cls, parts: Sequence["Dataset"]) -> "Dataset":
        if not parts:
            raise DatasetError("nothing to concatenate")
        first = parts[0]
        for p in parts[1:]:
            if p.feature_names != first.feature_names or p.label_vocab != first.label_vocab:
                raise DatasetError("cannot concatenate datasets with different schemas")
        return cls(
            np.vstack([p.X for p in parts]),
            np.concatenate([p.y for p in parts]),
            first.feature_names,
            first.label_vocab,
            np.concatenate([p.origin for p in parts]),
            np.concatenate([p.origin_fold for p in parts]),
        )

    def empty_like(self) -> "Dataset":
        return self.subset(np.array([], dtype=np.int64))

    # -- comparison / serialisation ---------------------------------------
    def equals(self, other: "Dataset") -> bool:
        return (
            self.feature_names == other.feature_names
            and self.label_vocab == other.label_vocab
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
            and list(self.origin) == list(other.origin)
            and np.array_equal(self.origin_fold, other.origin_fold)
        )

    def to_snapshot(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "label_vocab": list(self.label_vocab),
            "rows": self.X.tolist(),
            "labels": self.y.tolist(),
            "provenance": [self.provenance(i).to_json() for i in range(len(self))],
        }

    @classmethod
    def from_snapshot(cls, snap: Mapping) -> "Dataset":
        prov = [Provenance.from_json(p) for p in snap.get("provenance", [REAL] * len(snap["labels"]))]
        n_feat = len(snap["feature_names"])
        return cls(
            np.asarray(snap["rows"], dtype=np.float64).reshape(-1, n_feat),
            np.asarray(snap["labels"], dtype=np.int64),
            tuple(snap["feature_names"]),
            tuple(snap["label_vocab"]),
            np.array([p.generator_id for p in prov], dtype=object),
            np.array([p.fold_id for p in prov], dtype=np.int64),
        )

    def save_snapshot(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_snapshot(), sort_keys=True))

    @classmethod
    def load_snapshot(cls, path: str | Path) -> "Dataset":
        return cls.from_snapshot(json.loads(Path(path).read_text()))


# -- CSV ---------------------------------------------------------------------

def load_csv(path: str | Path, label_column: str = "Type") -> Dataset:
    """Read a headered CSV into a :class:`Dataset` of real rows.

    Every non-label cell must parse as a finite number.  The label vocabulary
    is ordered by first appearance in the file.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DatasetError(f"empty file: {path}")
        header = [h.strip() for h in header]
        if label_column not in header:
            raise DatasetError(f"label column {label_column!r} not in header {header}")
        label_pos = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_pos]
        rows: list[list[float]] = []
        labels: list[str] = []
        for line_no, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise DatasetError(f"row {line_no}: expected {len(header)} cells, got {len(record)}")
            values = []
            for col, cell in enumerate(record):
                if col == label_pos:
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise DatasetError(
                        f"row {line_no}, column {header[col]!r}: non-numeric value {cell!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DatasetError(f"row {line_no}, column {header[col]!r}: non-finite value {cell!r}")
                values.append(v)
            rows.append(values)
            labels.append(record[label_pos].strip())
    if not rows:
        raise DatasetError("empty dataset")
    vocab = list(dict.fromkeys(labels))
    lookup = {name: i for i, name in enumerate(vocab)}
    return Dataset(
        np.asarray(rows, dtype=np.float64),
        np.array([lookup[lab] for lab in labels], dtype=np.int64),
        tuple(feature_names),
        tuple(vocab),
    )


def _format_number(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_csv(ds: Dataset, path: str | Path, label_column: str = "Type") -> None:
    """Write real-valued rows back out in the format :func:`load_csv` reads."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([*ds.feature_names, label_column])
        for row, lab in zip(ds.X, ds.y):
            writer.writerow([*(_format_number(v) for v in row), ds.label_vocab[lab]])


# -- preprocessing -----------------------------------------------------------

def drop_constant_features(ds: Dataset) -> tuple[Dataset, list[str]]:
    """Remove columns that take one value in every row.

    Refuses when every column is constant, since the result would have no
    features left.
    """
    if ds.n_samples < 1:
        raise DatasetError("empty dataset")
    constant = np.all(ds.X == ds.X[0], axis=0)
    if constant.all():
        raise DatasetError("degenerate: all features constant")
    keep = ~constant
    removed = [name for name, c in zip(ds.feature_names, constant) if c]
    out = Dataset(
        ds.X[:, keep],
        ds.y,
        tuple(n for n, k in zip(ds.feature_names, keep) if k),
        ds.label_vocab,
        ds.origin,
        ds.origin_fold,
    )
    return out, removed


def aggregate_labels(ds: Dataset, mapping: Mapping[str, str]) -> Dataset:
    """Merge classes by name; labels not in ``mapping`` pass through.

    The new vocabulary keeps first-appearance order of the renamed labels in
    the old vocabulary order.
    """
    for src in mapping:
        if src not in ds.label_vocab:
            raise DatasetError(f"unknown source label {src!r}")
    renamed = [mapping.get(name, name) for name in ds.label_vocab]
    new_vocab = list(dict.fromkeys(renamed))
    remap = np.array([new_vocab.index(r) for r in renamed], dtype=np.int64)
    return Dataset(ds.X, remap[ds.y], ds.feature_names, tuple(new_vocab), ds.origin, ds.origin_fold)


def find_label(vocab: Iterable[str], keyword: str) -> str:
    """Return the single vocabulary entry containing ``keyword`` (case-insensitive)."""
    hits = [v for v in vocab if keyword.lower() in v.lower()]
    if len(hits) != 1:
        raise DatasetError(f"expected exactly one class matching {keyword!r}, found {hits}")
    return hits[0]


# -- folds -------------------------------------------------------------------

@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple[tuple[int, ...], ...]
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.asarray(self.folds[fold], dtype=np.int64)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.asarray(
            sorted(i for f, idx in enumerate(self.folds) if f != fold for i in idx), dtype=np.int64
        )

    def to_json(self) -> dict:
        return {"k": self.k, "seed": self.seed, "folds": [list(f) for f in self.folds]}


def stratified_kfold(ds: Dataset, k: int, seed: int) -> FoldPlan:
    """Split row indices into ``k`` stratified folds.

    Each class is shuffled with a seeded generator and dealt round-robin.  The
    dealing position carries over from one class to the next, so remainders
    spread across folds and fold totals differ by at most one.
    """
    if k < 1:
        raise DatasetError("k must be a positive integer")
    counts = np.bincount(ds.y, minlength=ds.n_classes)
    for c, n in enumerate(counts):
        if 0 < n < k:
            raise DatasetError(f"unsplittable class {ds.label_vocab[c]!r}: {n} samples < k={k}")
    rng = np.random.default_rng(seed_derive(seed, "stratified_kfold"))
    folds: list[list[int]] = [[] for _ in range(k)]
    pointer = 0
    for c in range(ds.n_classes):
        members = np.flatnonzero(ds.y == c)
        if members.size == 0:
            continue
        members = rng.permutation(members)
        for j, idx in enumerate(members):
            folds[(pointer + j) % k].append(int(idx))
        pointer = (pointer + members.size) % k
    return FoldPlan(k=k, folds=tuple(tuple(sorted(f)) for f in folds), seed=seed)
