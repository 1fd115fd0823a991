"""Distances, similarities and dissimilarity-matrix construction.

A dissimilarity matrix is held as a dense symmetric ``(n, n)`` float array
with a zero diagonal. :func:`as_dissimilarity` validates that shape.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DataError

METRICS = ("euclidean", "squared_euclidean", "manhattan", "minkowski", "chebyshev")


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise DataError(f"dimension mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise DataError("vectors must have at least one coordinate")
    return a, b


def minkowski(a, b, p: float = 2.0) -> float:
    """Minkowski ``L_p`` distance, ``(sum |a_i - b_i|**p) ** (1/p)`` for ``p >= 1``."""
    if not p >= 1:
        raise ValueError(f"Minkowski order must be >= 1, got {p}")
    a, b = _pair(a, b)
    if math.isinf(p):
        return chebyshev(a, b)
    diff = np.abs(a - b)
    if p == 1:
        return float(diff.sum())
    # scale by the largest term so tiny or huge differences neither underflow nor overflow
    top = diff.max()
    if top == 0:
        return 0.0
    diff /= top
    if p == 2:
        return float(top * math.sqrt(np.dot(diff, diff)))
    return float(top * (diff**p).sum() ** (1.0 / p))


def chebyshev(a, b) -> float:
    """Maximum coordinate difference (the ``p -> inf`` Minkowski limit)."""
    a, b = _pair(a, b)
    return float(np.max(np.abs(a - b)))


def squared_euclidean(a, b) -> float:
    a, b = _pair(a, b)
    diff = a - b
    return float(np.dot(diff, diff))


def cosine_similarity(a, b) -> float:
    a, b = _pair(a, b)
    sa, sb = np.abs(a).max(), np.abs(b).max()
    if sa == 0 or sb == 0:
        raise DataError("cosine similarity is undefined for a zero vector")
    # the angle is scale-free; rescaling first keeps the norms representable
    a, b = a / sa, b / sb
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    # rounding can push |cos| a hair past 1
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def similarity_to_dissimilarity(S, *, include_diagonal: bool = False) -> np.ndarray:
    """Convert a symmetric similarity matrix with ``d = max(S) - S``.

    By default the maximum is taken over off-diagonal entries only, so large
    self-similarities do not inflate the offset; ``include_diagonal=True``
    uses the maximum of the whole matrix. The diagonal of the result is
    zero. No rescaling is applied.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DataError(f"similarity matrix must be square, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise DataError("similarity matrix contains non-finite entries")
    if not np.array_equal(S, S.T):
        raise DataError("similarity matrix is not symmetric")
    n = S.shape[0]
    if n < 2:
        return np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    D = (S.max() if include_diagonal else S[off].max()) - S
    np.fill_diagonal(D, 0.0)
    return D


def pairwise(X, metric: str = "euclidean", p: float = 2.0) -> np.ndarray:
    """Full dissimilarity matrix between the rows of ``X``.

    ``metric`` is one of :data:`METRICS`; ``p`` is only read for
    ``"minkowski"``. The geometric criteria (median, centroid, Ward) expect
    ``"squared_euclidean"``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DataError(f"data must be a 2-D array, got {X.ndim}-D")
    n = X.shape[0]
    if n < 2:
        raise DataError(f"need at least 2 objects, got {n}")
    if not np.all(np.isfinite(X)):
        raise DataError("data contains non-finite values")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if metric == "minkowski":
        if not p >= 1:
            raise ValueError(f"Minkowski order must be >= 1, got {p}")
        if math.isinf(p):
            metric = "chebyshev"
        elif p == 1:
            metric = "manhattan"
        elif p == 2:
            metric = "euclidean"

    D = np.empty((n, n))
    for i in range(n):
        diff = np.abs(X - X[i])
        if metric in ("euclidean", "squared_euclidean"):
            row = np.einsum("ij,ij->i", diff, diff)
            if metric == "euclidean":
                row = np.sqrt(row)
        elif metric == "manhattan":
            row = diff.sum(axis=1)
        elif metric == "chebyshev":
            row = diff.max(axis=1)
        else:
            row = (diff**p).sum(axis=1) ** (1.0 / p)
        D[i] = row
    # symmetrise exactly; row-wise reductions may differ in the last ulp
    D = np.minimum(D, D.T)
    np.fill_diagonal(D, 0.0)
    return D


def as_dissimilarity(D, *, check_symmetric: bool = True) -> np.ndarray:
    """Validate and return ``D`` as a float dissimilarity matrix (a copy)."""
    D = np.array(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DataError(f"dissimilarity matrix must be square, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise DataError("dissimilarity matrix contains non-finite entries")
    if np.any(D < 0):
        raise DataError("dissimilarity matrix has negative entries")
    if check_symmetric and not np.allclose(D, D.T, rtol=1e-12, atol=0):
        raise DataError("dissimilarity matrix is not symmetric")
    D = np.minimum(D, D.T)
    np.fill_diagonal(D, 0.0)
    return D
