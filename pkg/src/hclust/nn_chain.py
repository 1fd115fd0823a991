"""Nearest-neighbour chain agglomeration for reducible criteria.

A chain of successive nearest neighbours is grown until its last two
elements are reciprocal nearest neighbours, which are merged at once; the
chain then resumes from the element before them. For criteria with the
reducibility property this yields the same hierarchy as merging the global
closest pair at every step, in O(n^2) time.

Two storage modes:

* matrix mode (:func:`cluster`): any reducible criterion, O(n^2) space,
  Lance-Williams updates applied in place;
* centre mode (:func:`cluster_data` with Ward): O(n) space, dissimilarities
  recomputed from centres and masses.
"""
from __future__ import annotations

import time
from typing import Sequence

import numpy as np
from numba import njit

from .dendrogram import Dendrogram, from_leaf_merges
from .errors import DataError, IncompatibleMethodError
from .lance_williams import Method, _coefficient_arrays, _weights, ward_initial
from .metrics import as_dissimilarity, pairwise


def reducible(method: Method | str) -> bool:
    return Method.parse(method).reducible


def _require_reducible(method) -> Method:
    method = Method.parse(method)
    if not method.reducible:
        raise IncompatibleMethodError(
            f"the NN-chain engine requires a reducible criterion; {method.value} "
            "can produce inversions. Use the stored-data or Lance-Williams "
            "(oracle) engine instead."
        )
    return method


class _MatrixRows:
    """Dissimilarity rows held in a full matrix, updated by Lance-Williams."""

    def __init__(self, D: np.ndarray, mass: np.ndarray, method: Method):
        self.W = D.copy()
        np.fill_diagonal(self.W, np.inf)
        self.mass = mass
        self.method = method
        self.alive = np.ones(len(D), dtype=bool)

    def row(self, k: int) -> np.ndarray:
        return self.W[k]

    def merge(self, i: int, j: int) -> None:
        W = self.W
        a_i, a_j, beta, gamma = _coefficient_arrays(
            self.method, self.mass[i], self.mass[j], self.mass
        )
        with np.errstate(invalid="ignore"):
            row = a_i * W[i] + a_j * W[j] + beta * W[i, j] + gamma * np.abs(W[i] - W[j])
        row[~self.alive] = np.inf
        row[i] = row[j] = np.inf
        W[i, :] = row
        W[:, i] = row
        W[j, :] = np.inf
        W[:, j] = np.inf
        self.alive[j] = False
        self.mass[i] += self.mass[j]


class _WardCenters:
    """Ward dissimilarities computed on demand from centres and masses."""

    def __init__(self, X: np.ndarray, mass: np.ndarray):
        self.C = X.copy()
        self.mass = mass
        self.alive = np.ones(len(X), dtype=bool)
        # +inf for dead slots, added to every row instead of masking
        self.dead = np.zeros(len(X))
        self._diff = np.empty_like(self.C)
        self._w = np.empty(len(X))

    def row(self, k: int) -> np.ndarray:
        diff, w = self._diff, self._w
        np.subtract(self.C, self.C[k], out=diff)
        d = np.einsum("ij,ij->i", diff, diff)
        mk = self.mass[k]
        np.add(self.mass, mk, out=w)
        np.divide(self.mass, w, out=w)
        d *= w
        d *= mk
        d += self.dead
        d[k] = np.inf
        return d

    def merge(self, i: int, j: int) -> None:
        mi, mj = self.mass[i], self.mass[j]
        self.C[i] = (mi * self.C[i] + mj * self.C[j]) / (mi + mj)
        self.mass[i] = mi + mj
        self.alive[j] = False
        self.dead[j] = np.inf


def _run_chain(rows, n: int, validate: bool, stats: dict | None):
    alive = rows.alive
    chain: list[int] = []
    found = []
    peak_live = int(alive.sum())
    longest = 0
    remaining = n
    while remaining > 1:
        if not chain:
            chain.append(int(np.argmax(alive)))
        top = chain[-1]
        d = rows.row(top)
        nn = int(np.argmin(d))
        if len(chain) >= 2:
            prev = chain[-2]
            # prefer the predecessor on ties so the chain always terminates
            if d[prev] <= d[nn]:
                nn = prev
        if len(chain) >= 2 and nn == chain[-2]:
            chain.pop()
            chain.pop()
            i, j = min(top, nn), max(top, nn)
            h = float(d[nn])
            if validate:
                _check_rnn(rows, i, j, h)
            rows.merge(i, j)
            found.append((i, j, max(h, 0.0)))
            remaining -= 1
        else:
            if validate and len(chain) >= 2 and d[nn] > _slack(d[chain[-2]]):
                raise AssertionError(f"chain dissimilarity increased at {top} -> {nn}")
            chain.append(nn)
            longest = max(longest, len(chain))
    if stats is not None:
        stats["peak_live"] = peak_live
        stats["longest_chain"] = longest
    return found


def _slack(x: float) -> float:
    # centre-mode rows are recomputed, so equal values may differ by an ulp
    return x + 1e-12 * abs(x)


def _check_rnn(rows, i: int, j: int, h: float) -> None:
    for a in (i, j):
        best = float(np.min(rows.row(a)))
        if _slack(best) < h:
            raise AssertionError(f"merging ({i}, {j}) at {h} but {a} has a neighbour at {best}")


@njit(cache=True)
def _ward_chain_kernel(C, mass):
    """Compiled centre-mode chain for Ward; returns discovered merges."""
    n, m = C.shape
    alive = np.ones(n, dtype=np.bool_)
    chain = np.empty(n, dtype=np.int64)
    left = np.empty(n - 1, dtype=np.int64)
    right = np.empty(n - 1, dtype=np.int64)
    height = np.empty(n - 1)
    depth = 0
    lowest = 0
    for t in range(n - 1):
        while True:
            if depth == 0:
                while not alive[lowest]:
                    lowest += 1
                chain[0] = lowest
                depth = 1
            top = chain[depth - 1]
            prev = chain[depth - 2] if depth >= 2 else -1
            mk = mass[top]
            best = np.inf
            nn = -1
            d_prev = np.inf
            for k in range(n):
                if not alive[k] or k == top:
                    continue
                s = 0.0
                for c in range(m):
                    diff = C[k, c] - C[top, c]
                    s += diff * diff
                d = s * (mass[k] / (mass[k] + mk)) * mk
                if k == prev:
                    d_prev = d
                if d < best:
                    best = d
                    nn = k
            if prev >= 0 and d_prev <= best:
                nn = prev
                best = d_prev
            if nn == prev:
                break
            chain[depth] = nn
            depth += 1
        depth -= 2
        i = min(top, nn)
        j = max(top, nn)
        mi = mass[i]
        mj = mass[j]
        for c in range(m):
            C[i, c] = (mi * C[i, c] + mj * C[j, c]) / (mi + mj)
        mass[i] = mi + mj
        alive[j] = False
        left[t] = i
        right[t] = j
        height[t] = max(best, 0.0)
    return left, right, height


def _canonical_order(found: list[tuple[int, int, float]], n: int):
    """Sort discovered merges by height while keeping children before parents."""
    slot_merge = [-1] * n
    effective = []
    for t, (i, j, h) in enumerate(found):
        eff = h
        for s in (i, j):
            if slot_merge[s] >= 0:
                eff = max(eff, effective[slot_merge[s]])
        effective.append(eff)
        slot_merge[i] = t
    order = sorted(range(len(found)), key=lambda t: (effective[t], t))
    return [found[t] for t in order]


def cluster(
    D,
    method: Method | str,
    weights: Sequence[float] | None = None,
    labels: Sequence[str] = (),
    *,
    validate: bool = False,
    stats: dict | None = None,
) -> Dendrogram:
    """NN-chain clustering of a dissimilarity matrix (matrix mode).

    Ward expects squared Euclidean input, as in the Lance-Williams engine.
    With ``validate=True`` every merge is checked to join reciprocal nearest
    neighbours and every chain step to be non-increasing.
    """
    method = _require_reducible(method)
    D = as_dissimilarity(D)
    n = D.shape[0]
    if n < 2:
        raise DataError(f"need at least 2 objects, got {n}")
    mass = _weights(weights, n)
    if method is Method.WARD:
        D = ward_initial(D, mass)
    found = _run_chain(_MatrixRows(D, mass, method), n, validate, stats)
    return from_leaf_merges(n, _canonical_order(found, n), labels)


def cluster_data(
    X,
    method: Method | str,
    weights: Sequence[float] | None = None,
    labels: Sequence[str] = (),
    *,
    metric: str = "euclidean",
    p: float = 2.0,
    validate: bool = False,
    stats: dict | None = None,
) -> Dendrogram:
    """NN-chain clustering of raw coordinates.

    Ward runs in centre mode with O(n) storage (``metric`` is ignored: the
    criterion is defined on squared Euclidean geometry). Other criteria
    build the ``metric`` dissimilarity matrix and run in matrix mode.
    """
    method = _require_reducible(method)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n < 2:
        raise DataError(f"need at least 2 objects, got {n}")
    if not np.all(np.isfinite(X)):
        raise DataError("data contains non-finite values")
    if method is not Method.WARD:
        return cluster(
            pairwise(X, metric, p), method, weights, labels, validate=validate, stats=stats
        )
    mass = _weights(weights, n)
    if validate:
        found = _run_chain(_WardCenters(X, mass), n, validate, stats)
    else:
        i, j, h = _ward_chain_kernel(X.copy(), mass)
        found = list(zip(i.tolist(), j.tolist(), h.tolist()))
        if stats is not None:
            # one centre and one mass per slot, allocated up front
            stats["peak_live"] = n
    return from_leaf_merges(n, _canonical_order(found, n), labels)


def synthetic_data(n: int, m: int = 2, seed: int = 0) -> np.ndarray:
    """Uniform points in the unit cube, reproducible from ``seed``."""
    return np.random.default_rng(seed).random((n, m))


def complexity_probe(
    sizes: Sequence[int],
    method: Method | str = Method.WARD,
    *,
    m: int = 2,
    seed: int = 0,
    repeats: int = 3,
) -> list[dict]:
    """Time NN-chain runs on synthetic data of growing size.

    Returns one record per size with ``n``, ``seconds`` (best of
    ``repeats``) and ``peak_live``. Ward is timed in centre mode, other
    criteria in matrix mode with the matrix built outside the timer.
    """
    method = _require_reducible(method)
    report = []
    for n in sizes:
        X = synthetic_data(n, m, seed)
        D = None if method is Method.WARD or n < 2 else pairwise(X, "euclidean")
        best = float("inf")
        stats: dict = {}
        for _ in range(repeats):
            start = time.perf_counter()
            if n >= 2:
                if D is None:
                    cluster_data(X, method, stats=stats)
                else:
                    cluster(D, method, stats=stats)
            best = min(best, time.perf_counter() - start)
        report.append({"n": n, "seconds": best, "peak_live": stats.get("peak_live", n)})
    return report
