"""Brute-force reference computations shared by the test modules.

Everything here is written directly from definitions and deliberately avoids
the package's own helpers, so agreement with the engines means something.
"""
import itertools

import numpy as np


def random_points(seed, n_range=(5, 64), m_range=(1, 5)):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    return rng.random((n, m))


def sq_dists(X):
    X = np.asarray(X, dtype=float)
    n = len(X)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            D[i, j] = sum((a - b) ** 2 for a, b in zip(X[i], X[j]))
    return D


def euclid_dists(X):
    return np.sqrt(sq_dists(X))


def merge_members(d):
    """``(left leaves, right leaves, height)`` for every merge, in order."""
    sets = [[i] for i in range(d.n)]
    out = []
    for mg in d.merges:
        a, b = sets[mg.left], sets[mg.right]
        out.append((a, b, mg.height))
        sets.append(a + b)
    return out


def lca_cophenetic(d):
    """Cophenetic matrix by searching, per pair, the first merge holding both."""
    steps = merge_members(d)
    C = np.zeros((d.n, d.n))
    for i in range(d.n):
        for j in range(d.n):
            if i == j:
                continue
            for a, b, h in steps:
                if (i in a and j in b) or (i in b and j in a):
                    C[i, j] = h
                    break
    return C


def minimax_path(D):
    """Smallest achievable largest edge over every simple path, by enumeration."""
    n = len(D)
    out = np.zeros((n, n))
    for s in range(n):
        for t in range(s + 1, n):
            rest = [k for k in range(n) if k not in (s, t)]
            best = np.inf
            for r in range(len(rest) + 1):
                for mid in itertools.permutations(rest, r):
                    path = (s, *mid, t)
                    best = min(best, max(D[a, b] for a, b in zip(path, path[1:])))
            out[s, t] = out[t, s] = best
    return out


def within_variance(X, members, w=None):
    """Mass-weighted sum of squared deviations of ``members`` from their mean."""
    X = np.asarray(X, dtype=float)[members]
    w = np.ones(len(members)) if w is None else np.asarray(w, dtype=float)[members]
    mean = (w[:, None] * X).sum(axis=0) / w.sum()
    return float((w * ((X - mean) ** 2).sum(axis=1)).sum())


def is_ultrametric(D):
    n = len(D)
    return all(
        D[i, j] <= max(D[i, k], D[k, j])
        for i in range(n)
        for j in range(n)
        for k in range(n)
    )
