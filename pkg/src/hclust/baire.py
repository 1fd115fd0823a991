"""Baire (longest-common-prefix) hierarchy on base-m digit expansions.

Values in [0, 1) are truncated to ``K`` base-``m`` digits. Two keys sharing
a prefix of length ``l`` are at distance ``m**-l``; this is an ultrametric,
and the prefix trie of all keys is the corresponding hierarchy, built in
one pass over the data. Leaves of the trie are grid cells.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dendrogram import Partition
from .errors import DataError

DEFAULT_BASE = 10
DEFAULT_PRECISION = 8
DEFAULT_CAP = 2000


@dataclass(frozen=True)
class BaireKey:
    digits: tuple[int, ...]
    base: int = DEFAULT_BASE

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(x) for x in self.digits))
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if not self.digits:
            raise ValueError("a key needs at least one digit")
        if any(not 0 <= x < self.base for x in self.digits):
            raise ValueError(f"digit out of range for base {self.base}: {self.digits}")

    @property
    def precision(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return format_digits(self.digits, self.base)


def format_digits(digits: Sequence[int], base: int) -> str:
    if base <= 36:
        return "".join(np.base_repr(int(x), base).lower() for x in digits)
    return ".".join(str(int(x)) for x in digits)


def _check_params(m: int, K: int) -> None:
    if m < 2:
        raise ValueError(f"base must be >= 2, got {m}")
    if K < 1:
        raise ValueError(f"precision must be >= 1, got {K}")


def _exact_code(v: float, scale: int) -> int:
    # the shortest repr of a float is the decimal the caller meant: 0.29, not 0.28999...
    return int(Fraction(repr(float(v))) * scale)


def codes(values, m: int = DEFAULT_BASE, K: int = DEFAULT_PRECISION) -> np.ndarray:
    """Integer ``floor(v * m**K)`` for each value, i.e. its K-digit truncation."""
    _check_params(m, K)
    v = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(v)) or np.any(v < 0) or np.any(v >= 1):
        raise DataError("values must lie in [0, 1); normalise them first")
    scale = m**K
    if scale >= 2**53:
        return np.array([_exact_code(x, scale) for x in v], dtype=object)
    x = v * scale
    q = np.floor(x).astype(np.int64)
    # products landing next to an integer may be off by one from float noise
    near = np.flatnonzero(np.abs(x - np.rint(x)) < 1e-6)
    for idx in near:
        q[idx] = _exact_code(v[idx], scale)
    return q


def _digits_from_codes(q: np.ndarray, m: int, K: int) -> np.ndarray:
    """Level-major digits: row ``k`` holds digit ``k + 1`` of every value."""
    out = np.empty((K, len(q)), dtype=np.int64)
    for k in range(K - 1, -1, -1):
        out[k] = q % m
        q = q // m
    return out


def digitize(v: float, m: int = DEFAULT_BASE, K: int = DEFAULT_PRECISION) -> BaireKey:
    """First ``K`` base-``m`` digits of ``v`` in [0, 1), by truncation."""
    q = codes([v], m, K)
    return BaireKey(tuple(_digits_from_codes(q, m, K)[:, 0].tolist()), m)


def common_prefix_length(x: Sequence[int], y: Sequence[int]) -> int:
    n = 0
    for a, b in zip(x, y):
        if a != b:
            break
        n += 1
    return n


def baire_distance(x: BaireKey, y: BaireKey) -> float:
    """``m ** -l`` with ``l`` the length of the longest common prefix.

    Keys that agree on all ``K`` digits are at ``m ** -K``: equality at
    finite precision is not identity of the objects.
    """
    if x.base != y.base or x.precision != y.precision:
        raise ValueError(
            f"keys differ in base/precision: ({x.base}, {x.precision}) vs ({y.base}, {y.precision})"
        )
    return x.base ** -common_prefix_length(x.digits, y.digits)


def normalize_unit(values, policy: str = "auto") -> np.ndarray:
    """Map raw values into [0, 1).

    ``"minmax"`` sends the minimum to 0 and the maximum to the largest float
    below 1; a constant input maps to all zeros. ``"none"`` only checks the
    range. ``"auto"`` keeps values already in [0, 1) and min-max scales
    anything else.
    """
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise DataError("values contain non-finite entries")
    if policy == "auto":
        policy = "none" if np.all((v >= 0) & (v < 1)) else "minmax"
    if policy == "none":
        if np.any(v < 0) or np.any(v >= 1):
            raise DataError("values must lie in [0, 1) when normalisation is 'none'")
        return v.copy()
    if policy != "minmax":
        raise ValueError(f"unknown normalisation policy {policy!r}")
    lo, hi = v.min(axis=0), v.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    u = np.where(hi > lo, (v - lo) / span, 0.0)
    return np.minimum(u, np.nextafter(1.0, 0.0))


class BaireTree:
    """Prefix trie over base-``m`` keys, stored level by level.

    ``node_of[k][obj]`` is the depth-``k`` node holding ``obj``: the objects
    sharing its length-``k`` digit prefix. ``parent[k][node]`` links a
    depth-``k`` node to depth ``k - 1``. Node ids at each depth follow the
    lexicographic order of their prefixes. Depth ``K`` nodes are the grid
    cells.
    """

    def __init__(self, digits: np.ndarray, base: int, ids: Sequence[str] = ()):
        """``digits`` is level-major: shape ``(K, n)``, row ``k`` = digit ``k + 1``."""
        digits = np.asarray(digits, dtype=np.int64)
        if digits.ndim != 2 or digits.shape[0] < 1 or digits.shape[1] == 0:
            raise DataError("need at least one key of at least one digit")
        if np.any(digits < 0) or np.any(digits >= base):
            raise DataError(f"digits out of range for base {base}")
        self.digits = digits
        self.base = base
        self.precision, n = digits.shape
        self._ids = tuple(str(x) for x in ids) if ids else None
        if self._ids is not None and len(self._ids) != n:
            raise DataError(f"{len(self._ids)} ids for {n} keys")
        self.node_of: list[np.ndarray] = [np.zeros(n, dtype=np.int32)]
        self.parent: list[np.ndarray] = [np.array([-1], dtype=np.int32)]
        self.digit_ops = 0
        self._grow()

    def _grow(self) -> None:
        m = self.base
        for k in range(self.precision):
            above = self.node_of[-1]
            child_key = above.astype(np.int64) * m + self.digits[k]
            self.digit_ops += len(child_key)
            # compact the (parent, digit) codes to dense ids without sorting
            seen = np.zeros(len(self.parent[-1]) * m, dtype=bool)
            seen[child_key] = True
            dense = np.cumsum(seen, dtype=np.int32) - 1
            self.node_of.append(dense[child_key])
            self.parent.append((np.flatnonzero(seen) // m).astype(np.int32))

    def __len__(self) -> int:
        return self.digits.shape[1]

    @property
    def keys(self) -> np.ndarray:
        """Object-major ``(n, K)`` view of the digits."""
        return self.digits.T

    @property
    def ids(self) -> tuple[str, ...]:
        if self._ids is None:
            self._ids = tuple(str(i) for i in range(len(self)))
        return self._ids

    def n_nodes(self, k: int) -> int:
        return len(self.parent[self._depth(k)])

    def _depth(self, k: int) -> int:
        if not 0 <= k <= self.precision:
            raise ValueError(f"level must lie in [0, {self.precision}], got {k}")
        return k

    def counts(self, k: int) -> np.ndarray:
        """Number of objects in each depth-``k`` node."""
        return np.bincount(self.node_of[self._depth(k)], minlength=self.n_nodes(k))

    def members(self, k: int, node: int) -> np.ndarray:
        return np.flatnonzero(self.node_of[self._depth(k)] == node)

    def children(self, k: int, node: int) -> np.ndarray:
        """Depth ``k + 1`` nodes below ``node``."""
        if self._depth(k) == self.precision:
            return np.empty(0, dtype=np.int64)
        return np.flatnonzero(self.parent[k + 1] == node)

    def prefix(self, k: int, node: int) -> tuple[int, ...]:
        first = int(np.argmax(self.node_of[self._depth(k)] == node))
        return tuple(self.keys[first, :k].tolist())

    def key(self, obj: int) -> BaireKey:
        return BaireKey(tuple(self.keys[obj].tolist()), self.base)

    def common_prefix(self, a: int, b: int) -> int:
        return sum(1 for k in range(1, self.precision + 1) if self.node_of[k][a] == self.node_of[k][b])


def build(
    values,
    m: int = DEFAULT_BASE,
    K: int = DEFAULT_PRECISION,
    *,
    normalize: str = "auto",
    ids: Sequence[str] = (),
    attribute: int | None = None,
    interleave: bool = False,
) -> BaireTree:
    """Digitise ``values`` and build the prefix trie in O(n * K) time.

    ``values`` is 1-D, or 2-D with either ``attribute`` selecting the column
    to cluster or ``interleave=True``. Interleaving normalises every column,
    digitises each to ``K`` digits and alternates them (digit 1 of every
    column, then digit 2, ...), giving keys of length ``K * columns``.
    """
    _check_params(m, K)
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise DataError("cannot build a Baire tree from empty input")
    if v.ndim == 2 and not interleave:
        if attribute is None:
            if v.shape[1] != 1:
                raise DataError("multivariate input needs an attribute index or interleave=True")
            attribute = 0
        v = v[:, attribute]
    if v.ndim == 1:
        u = normalize_unit(v, normalize)
        keys = _digits_from_codes(codes(u, m, K), m, K)
    elif v.ndim == 2:
        u = normalize_unit(v, normalize)
        per_col = [_digits_from_codes(codes(u[:, c], m, K), m, K) for c in range(u.shape[1])]
        # digit k of every column, then digit k + 1, ...
        keys = np.stack(per_col, axis=1).reshape(-1, len(u))
    else:
        raise DataError(f"values must be 1-D or 2-D, got {v.ndim}-D")
    return BaireTree(keys, m, ids)


def partition_at(tree: BaireTree, k: int) -> Partition:
    """Objects grouped by their length-``k`` digit prefix."""
    if not 1 <= k <= tree.precision:
        raise ValueError(f"level must lie in [1, {tree.precision}], got {k}")
    return Partition.from_groups(tree.node_of[k].tolist())


def to_dissimilarity(tree: BaireTree, ids: Sequence[int] | None = None, cap: int = DEFAULT_CAP):
    """Pairwise Baire distances among ``ids`` (all objects by default).

    The output is quadratic, so the subset size is limited by ``cap``.
    """
    idx = np.arange(len(tree)) if ids is None else np.asarray(ids, dtype=int)
    if len(idx) > cap:
        raise ValueError(f"{len(idx)} objects exceed the cap of {cap}")
    K = tree.precision
    prefix = np.zeros((len(idx), len(idx)), dtype=np.int64)
    for k in range(1, K + 1):
        node = tree.node_of[k][idx]
        prefix += node[:, None] == node[None, :]
    table = np.array([tree.base**-ell for ell in range(K + 1)])
    D = table[prefix]
    np.fill_diagonal(D, 0.0)
    return D


def partitions_to_tsv(tree: BaireTree, levels: Sequence[int]) -> str:
    buf = io.StringIO()
    buf.write("id\t" + "\t".join(f"level_{k}" for k in levels) + "\n")
    parts = [partition_at(tree, k).labels for k in levels]
    for obj, name in enumerate(tree.ids):
        buf.write(name + "\t" + "\t".join(str(p[obj]) for p in parts) + "\n")
    return buf.getvalue()


def keys_to_tsv(tree: BaireTree) -> str:
    buf = io.StringIO()
    buf.write("id\tkey\n")
    for obj, name in enumerate(tree.ids):
        buf.write(f"{name}\t{format_digits(tree.keys[obj], tree.base)}\n")
    return buf.getvalue()
