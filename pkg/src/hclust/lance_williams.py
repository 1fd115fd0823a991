"""Stored-dissimilarities agglomeration driven by the Lance-Williams update.

This is the reference engine: at every step the globally closest pair is
merged and its row of the dissimilarity matrix is rewritten with

    d(i+j, k) = a_i d(i,k) + a_j d(j,k) + b d(i,j) + g |d(i,k) - d(j,k)|

Worst case O(n^3) time, O(n^2) space. Clarity over speed: every other
engine is tested against it.
"""
from __future__ import annotations

from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .dendrogram import Dendrogram, from_leaf_merges
from .errors import DataError
from .metrics import as_dissimilarity


class Method(str, Enum):
    SINGLE = "single"
    COMPLETE = "complete"
    GROUP_AVERAGE = "average"
    MCQUITTY = "mcquitty"
    MEDIAN = "median"
    CENTROID = "centroid"
    WARD = "ward"

    @property
    def reducible(self) -> bool:
        """Whether the criterion satisfies the reducibility property (no inversions)."""
        return self not in (Method.MEDIAN, Method.CENTROID)

    @property
    def geometric(self) -> bool:
        """Whether the criterion is defined through cluster centres.

        Geometric criteria need squared Euclidean input when run from a
        dissimilarity matrix.
        """
        return self in (Method.MEDIAN, Method.CENTROID, Method.WARD)

    @classmethod
    def parse(cls, name: "str | Method") -> "Method":
        if isinstance(name, Method):
            return name
        key = name.strip().lower().replace("-", "_")
        try:
            return _ALIASES[key]
        except KeyError:
            raise ValueError(f"unknown method {name!r}") from None


_ALIASES = {m.value: m for m in Method}
_ALIASES.update(
    {
        "group_average": Method.GROUP_AVERAGE,
        "groupaverage": Method.GROUP_AVERAGE,
        "upgma": Method.GROUP_AVERAGE,
        "weighted": Method.MCQUITTY,
        "wpgma": Method.MCQUITTY,
        "gower": Method.MEDIAN,
        "wpgmc": Method.MEDIAN,
        "upgmc": Method.CENTROID,
        "minimum_variance": Method.WARD,
    }
)


class LWCoefficients(NamedTuple):
    alpha_i: float
    alpha_j: float
    beta: float
    gamma: float


def coefficients(method: Method, size_i: float, size_j: float, size_k: float) -> LWCoefficients:
    """Lance-Williams coefficients for merging ``i`` and ``j``, seen from ``k``.

    Sizes may be real masses (object weights) as well as cardinalities.
    """
    a, b, g, c = _coefficient_arrays(Method.parse(method), size_i, size_j, size_k)
    return LWCoefficients(float(a), float(b), float(g), float(c))


def _coefficient_arrays(method: Method, ni, nj, nk):
    # nk may be an array; the result broadcasts against it
    nk = np.asarray(nk, dtype=float)
    ones = np.ones_like(nk)
    if method is Method.SINGLE:
        return 0.5 * ones, 0.5 * ones, 0.0 * ones, -0.5 * ones
    if method is Method.COMPLETE:
        return 0.5 * ones, 0.5 * ones, 0.0 * ones, 0.5 * ones
    if method is Method.MCQUITTY:
        return 0.5 * ones, 0.5 * ones, 0.0 * ones, 0.0 * ones
    if method is Method.MEDIAN:
        return 0.5 * ones, 0.5 * ones, -0.25 * ones, 0.0 * ones
    if method is Method.GROUP_AVERAGE:
        s = ni + nj
        return ni / s * ones, nj / s * ones, 0.0 * ones, 0.0 * ones
    if method is Method.CENTROID:
        s = ni + nj
        return ni / s * ones, nj / s * ones, -(ni * nj) / (s * s) * ones, 0.0 * ones
    if method is Method.WARD:
        s = ni + nj + nk
        return (ni + nk) / s, (nj + nk) / s, -nk / s, 0.0 * ones
    raise ValueError(f"unsupported method {method!r}")


def update(d_ik: float, d_jk: float, d_ij: float, c: LWCoefficients) -> float:
    """One application of the Lance-Williams recurrence."""
    return c.alpha_i * d_ik + c.alpha_j * d_jk + c.beta * d_ij + c.gamma * abs(d_ik - d_jk)


def _weights(weights, n: int) -> np.ndarray:
    if weights is None:
        return np.ones(n)
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape != (n,):
        raise DataError(f"expected {n} weights, got {w.size}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise DataError("weights must be finite and positive")
    return w.copy()


def ward_initial(D: np.ndarray, mass: np.ndarray) -> np.ndarray:
    """Ward criterion between singletons from squared Euclidean distances.

    For unit masses this halves every entry: the variance increase of
    joining two points is half their squared distance.
    """
    return D * (np.outer(mass, mass) / np.add.outer(mass, mass))


def cluster(
    D,
    method: Method | str,
    weights: Sequence[float] | None = None,
    labels: Sequence[str] = (),
) -> Dendrogram:
    """Agglomerate a dissimilarity matrix with the Lance-Williams recurrence.

    For median, centroid and Ward the matrix must hold squared Euclidean
    distances; this is not checked. Ties go to the lexicographically
    smallest ``(i, j)``, where a merged cluster keeps the smaller index.
    """
    method = Method.parse(method)
    D = as_dissimilarity(D)
    n = D.shape[0]
    if n < 2:
        raise DataError(f"need at least 2 objects, got {n}")
    mass = _weights(weights, n)
    if method is Method.WARD:
        D = ward_initial(D, mass)

    W = D.copy()
    np.fill_diagonal(W, np.inf)
    alive = np.ones(n, dtype=bool)
    pairs = []
    for _ in range(n - 1):
        flat = int(np.argmin(W))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        h = W[i, j]
        a_i, a_j, beta, gamma = _coefficient_arrays(method, mass[i], mass[j], mass)
        with np.errstate(invalid="ignore"):
            row = a_i * W[i] + a_j * W[j] + beta * h + gamma * np.abs(W[i] - W[j])
        np.maximum(row, 0.0, out=row)
        row[~alive] = np.inf
        row[i] = row[j] = np.inf
        W[i, :] = row
        W[:, i] = row
        W[j, :] = np.inf
        W[:, j] = np.inf
        alive[j] = False
        mass[i] += mass[j]
        pairs.append((i, j, float(h)))
    return from_leaf_merges(n, pairs, labels)
