"""Brute-force Euclidean nearest neighbours with index tie-breaking."""

from __future__ import annotations

import numpy as np

_CHUNK_ELEMS = 4_000_000


def sq_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distances between rows of ``A`` and ``B``.

    Computed from explicit differences (chunked over ``A``) rather than the
    ``|a|^2 + |b|^2 - 2ab`` expansion so that equal distances compare equal,
    which the index tie-break relies on.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    out = np.empty((len(A), len(B)))
    step = max(1, _CHUNK_ELEMS // max(1, B.size))
    for start in range(0, len(A), step):
        diff = A[start : start + step, None, :] - B[None, :, :]
        out[start : start + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def kneighbors(
    queries: np.ndarray,
    reference: np.ndarray,
    k: int,
    *,
    exclude_self: bool = False,
) -> np.ndarray:
    """Indices into ``reference`` of the ``k`` nearest rows for each query.

    Ties are broken by the lower reference index.  With ``exclude_self`` the
    queries are assumed to be ``reference`` itself and each row's own index is
    skipped (duplicates at distance zero are still eligible).
    """
    D = sq_distances(queries, reference)
    if exclude_self:
        np.fill_diagonal(D, np.inf)
        available = len(reference) - 1
    else:
        available = len(reference)
    if k > available:
        raise ValueError(f"requested {k} neighbours but only {available} available")
    order = np.argsort(D, axis=1, kind="stable")
    return order[:, :k]
