"""Cluster-centre agglomeration for the median, centroid and Ward criteria.

Only the centres and masses of live clusters are kept (O(n) storage) and
dissimilarities are recomputed from coordinates as needed. Each live
cluster caches its nearest neighbour so a step costs a scan of the caches
plus the rows invalidated by the merge.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dendrogram import Dendrogram, from_leaf_merges
from .errors import DataError, IncompatibleMethodError
from .lance_williams import Method, _weights

GEOMETRIC = (Method.MEDIAN, Method.CENTROID, Method.WARD)


@dataclass(frozen=True)
class ClusterCenter:
    g: np.ndarray
    mass: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float).ravel())
        if not self.mass > 0:
            raise DataError(f"cluster mass must be positive, got {self.mass}")


def _geometric(method) -> Method:
    method = Method.parse(method)
    if method not in GEOMETRIC:
        raise IncompatibleMethodError(
            f"{method.value} has no cluster-centre form; use the Lance-Williams "
            "or NN-chain engine"
        )
    return method


def _check_dims(a: ClusterCenter, b: ClusterCenter) -> None:
    if a.g.shape != b.g.shape:
        raise DataError(f"dimension mismatch: {a.g.size} vs {b.g.size}")


def merge_center(method, a: ClusterCenter, b: ClusterCenter) -> ClusterCenter:
    """Centre of the union of two clusters.

    Median takes the plain midpoint whatever the masses; centroid and Ward
    take the mass-weighted mean.
    """
    method = _geometric(method)
    _check_dims(a, b)
    if method is Method.MEDIAN:
        g = (a.g + b.g) / 2
    else:
        g = (a.mass * a.g + b.mass * b.g) / (a.mass + b.mass)
    return ClusterCenter(g, a.mass + b.mass)


def center_dissimilarity(method, a: ClusterCenter, b: ClusterCenter) -> float:
    method = _geometric(method)
    _check_dims(a, b)
    diff = a.g - b.g
    d2 = float(np.dot(diff, diff))
    if method is Method.WARD:
        return a.mass * b.mass / (a.mass + b.mass) * d2
    return d2


def median_equivalence_residual(a, b, c) -> float:
    """Gap between the two forms of the median update (zero up to rounding).

    Compares the Lance-Williams side ``d2(a,c)/2 + d2(b,c)/2 - d2(a,b)/4``
    with the squared distance from ``c`` to the midpoint of ``a`` and ``b``.
    """
    a, b, c = (np.asarray(v, dtype=float).ravel() for v in (a, b, c))

    def d2(x, y):
        diff = x - y
        return float(np.dot(diff, diff))

    recurrence = d2(a, c) / 2 + d2(b, c) / 2 - d2(a, b) / 4
    direct = d2(c, (a + b) / 2)
    return abs(recurrence - direct)


class _CenterState:
    """Live centres, masses and nearest-neighbour caches."""

    def __init__(self, X: np.ndarray, mass: np.ndarray, method: Method):
        self.C = X.copy()
        self.mass = mass
        self.method = method
        self.alive = np.ones(len(X), dtype=bool)
        self.nn = np.zeros(len(X), dtype=int)
        self.nnd = np.zeros(len(X))

    def row(self, k: int) -> np.ndarray:
        diff = self.C - self.C[k]
        d = np.einsum("ij,ij->i", diff, diff)
        if self.method is Method.WARD:
            d *= self.mass * self.mass[k] / (self.mass + self.mass[k])
        d[~self.alive] = np.inf
        d[k] = np.inf
        return d

    def refresh(self, k: int) -> np.ndarray:
        d = self.row(k)
        self.nn[k] = int(np.argmin(d))
        self.nnd[k] = d[self.nn[k]]
        return d

    def closest_pair(self) -> tuple[int, int]:
        live = np.flatnonzero(self.alive)
        dist = self.nnd[live]
        best = dist.min()
        cands = live[dist == best]
        pairs = [(min(k, self.nn[k]), max(k, self.nn[k])) for k in cands]
        i, j = min(pairs)
        return int(i), int(j)

    def merge(self, i: int, j: int) -> None:
        mi, mj = self.mass[i], self.mass[j]
        if self.method is Method.MEDIAN:
            self.C[i] = (self.C[i] + self.C[j]) / 2
        else:
            self.C[i] = (mi * self.C[i] + mj * self.C[j]) / (mi + mj)
        self.mass[i] = mi + mj
        self.alive[j] = False


def cluster(
    X,
    method: Method | str,
    weights: Sequence[float] | None = None,
    labels: Sequence[str] = (),
    *,
    stats: dict | None = None,
    observer: Callable[[np.ndarray, np.ndarray, np.ndarray], None] | None = None,
) -> Dendrogram:
    """Agglomerate raw coordinates by merging cluster centres.

    Produces the same hierarchy as the Lance-Williams engine run on the
    squared Euclidean matrix of ``X`` with the same tie rule. ``stats``, if
    given, receives ``peak_live`` (the largest number of simultaneously live
    cluster records). ``observer(centres, masses, alive)`` is called after
    every merge.
    """
    method = _geometric(method)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n < 2:
        raise DataError(f"need at least 2 objects, got {n}")
    if not np.all(np.isfinite(X)):
        raise DataError("data contains non-finite values")
    state = _CenterState(X, _weights(weights, n), method)
    for k in range(n):
        state.refresh(k)

    peak = n
    pairs = []
    for _ in range(n - 1):
        i, j = state.closest_pair()
        height = max(float(state.nnd[i]), 0.0)
        state.merge(i, j)
        pairs.append((i, j, height))
        peak = max(peak, int(state.alive.sum()))

        d_i = state.refresh(i)
        for k in np.flatnonzero(state.alive):
            if k == i:
                continue
            if state.nn[k] in (i, j):
                state.refresh(k)
            elif d_i[k] < state.nnd[k] or (d_i[k] == state.nnd[k] and i < state.nn[k]):
                state.nn[k] = i
                state.nnd[k] = d_i[k]
        if observer is not None:
            observer(state.C, state.mass, state.alive)

    if stats is not None:
        stats["peak_live"] = peak
    return from_leaf_merges(n, pairs, labels)
