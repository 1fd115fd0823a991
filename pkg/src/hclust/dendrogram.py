"""Dendrogram model: merge records, cophenetic read-off, cuts and export.

Node numbering follows the usual linkage convention: leaves are ``0..n-1``
and merge ``t`` creates node ``n + t``. Heights are the raw agglomerative
criterion values handed over by the engine (Ward heights are variance
increases, not their square roots).
"""
from __future__ import annotations

import heapq
import io
import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DataError


class Merge(NamedTuple):
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Partition:
    """Flat clustering; ``labels[i]`` is the cluster id of object ``i``.

    Cluster ids are contiguous from 0, numbered by first appearance.
    """

    labels: tuple[int, ...]

    @classmethod
    def from_groups(cls, keys: Sequence) -> "Partition":
        ids: dict = {}
        return cls(tuple(ids.setdefault(k, len(ids)) for k in keys))

    @property
    def n_clusters(self) -> int:
        return len(set(self.labels))

    def clusters(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_clusters)]
        for obj, c in enumerate(self.labels):
            out[c].append(obj)
        return out

    def refines(self, other: "Partition") -> bool:
        """True if every cluster of ``self`` lies inside one cluster of ``other``."""
        if len(self.labels) != len(other.labels):
            return False
        seen: dict[int, int] = {}
        for mine, theirs in zip(self.labels, other.labels):
            if seen.setdefault(mine, theirs) != theirs:
                return False
        return True


@dataclass(frozen=True)
class Dendrogram:
    n: int
    merges: tuple[Merge, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise DataError("a dendrogram needs at least one leaf")
        object.__setattr__(self, "merges", tuple(self.merges))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))
        else:
            object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if len(self.labels) != self.n:
            raise DataError(f"{len(self.labels)} labels for {self.n} leaves")
        if len(self.merges) != self.n - 1:
            raise DataError(f"expected {self.n - 1} merges, got {len(self.merges)}")
        sizes = [1] * self.n
        used = [False] * (2 * self.n - 1)
        for t, (left, right, height, size) in enumerate(self.merges):
            node = self.n + t
            if not (0 <= left < node and 0 <= right < node):
                raise DataError(f"merge {t} references a node not yet created")
            if left == right:
                raise DataError(f"merge {t} joins node {left} with itself")
            if used[left] or used[right]:
                raise DataError(f"merge {t} reuses an already merged node")
            used[left] = used[right] = True
            if not 0 <= height < math.inf:
                raise DataError(f"merge {t} has invalid height {height}")
            expected = sizes[left] + sizes[right]
            if size != expected:
                raise DataError(f"merge {t} has size {size}, expected {expected}")
            sizes.append(expected)

    @property
    def heights(self) -> np.ndarray:
        return np.array([mg.height for mg in self.merges], dtype=float)

    def as_array(self) -> np.ndarray:
        """``(n-1, 4)`` array of ``left, right, height, size`` rows."""
        return np.array(
            [(mg.left, mg.right, mg.height, mg.size) for mg in self.merges], dtype=float
        ).reshape(-1, 4)

    @classmethod
    def from_array(cls, Z, labels: Sequence[str] = ()) -> "Dendrogram":
        Z = np.asarray(Z, dtype=float).reshape(-1, 4)
        merges = [Merge(int(a), int(b), float(h), int(s)) for a, b, h, s in Z]
        return cls(len(merges) + 1, tuple(merges), tuple(labels))

    def leaf_sets(self) -> list[frozenset[int]]:
        """Leaf set of every node, indexed by node id."""
        sets = [frozenset((i,)) for i in range(self.n)]
        for mg in self.merges:
            sets.append(sets[mg.left] | sets[mg.right])
        return sets

    def node_heights(self) -> np.ndarray:
        """Height of every node; leaves sit at 0."""
        return np.concatenate([np.zeros(self.n), self.heights])


def from_leaf_merges(
    n: int, pairs: Iterable[tuple[int, int, float]], labels: Sequence[str] = ()
) -> Dendrogram:
    """Build a dendrogram from merges given as ``(leaf_a, leaf_b, height)``.

    Each pair names any leaf inside each of the two clusters being joined.
    The pairs must be in a valid agglomeration order.
    """
    parent = list(range(n))
    node_of = list(range(n))
    size = [1] * n

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    merges = []
    for t, (a, b, h) in enumerate(pairs):
        ra, rb = find(a), find(b)
        if ra == rb:
            raise DataError(f"merge {t} joins a cluster with itself")
        na, nb = node_of[ra], node_of[rb]
        if na > nb:
            na, nb = nb, na
        parent[rb] = ra
        size[ra] += size[rb]
        node_of[ra] = n + t
        merges.append(Merge(na, nb, float(h), size[ra]))
    return Dendrogram(n, tuple(merges), tuple(labels))


def cophenetic(d: Dendrogram) -> np.ndarray:
    """Matrix of heights of the lowest merge joining each pair of leaves."""
    C = np.zeros((d.n, d.n))
    members: list[list[int]] = [[i] for i in range(d.n)]
    for mg in d.merges:
        a, b = members[mg.left], members[mg.right]
        C[np.ix_(a, b)] = mg.height
        C[np.ix_(b, a)] = mg.height
        members.append(a + b)
        members[mg.left] = members[mg.right] = []
    return C


def detect_inversions(d: Dendrogram) -> list[int]:
    """Indices of merges lying strictly below one of their non-leaf children."""
    heights = d.node_heights()
    found = []
    for t, mg in enumerate(d.merges):
        below = max(heights[mg.left], heights[mg.right])
        if mg.height < below:
            found.append(t)
    return found


def cut(d: Dendrogram, *, k: int | None = None, height: float | None = None) -> Partition:
    """Flat partition from ``k`` clusters or a height threshold.

    ``k`` undoes the last ``k - 1`` merges. ``height`` keeps every merge at
    or below the threshold and is refused on dendrograms with inversions.
    """
    if (k is None) == (height is None):
        raise ValueError("give exactly one of k or height")
    if k is not None:
        if not 1 <= k <= d.n:
            raise ValueError(f"k must lie in [1, {d.n}], got {k}")
        keep = d.n - k
    else:
        if detect_inversions(d):
            raise DataError("cut by height is ill-defined on a dendrogram with inversions")
        keep = sum(1 for mg in d.merges if mg.height <= height)

    owner = list(range(d.n))
    members: list[list[int]] = [[i] for i in range(d.n)]
    for mg in d.merges[:keep]:
        members.append(members[mg.left] + members[mg.right])
    active = set(range(d.n + keep))
    for mg in d.merges[:keep]:
        active.discard(mg.left)
        active.discard(mg.right)
    for node in active:
        for leaf in members[node]:
            owner[leaf] = node
    return Partition.from_groups(owner)


def canonical_form(d: Dendrogram) -> Dendrogram:
    """Engine-independent representation of the same hierarchy.

    Merges are emitted by ``(height, smallest leaf id)`` subject to children
    preceding parents, and the child with the smaller leaf minimum is put on
    the left. The cophenetic matrix is unchanged.
    """
    n = d.n
    leafmin = list(range(n))
    for mg in d.merges:
        leafmin.append(min(leafmin[mg.left], leafmin[mg.right]))
    parent_of: dict[int, int] = {}
    for t, mg in enumerate(d.merges):
        parent_of[mg.left] = parent_of[mg.right] = t

    pending = [0] * len(d.merges)
    for t, mg in enumerate(d.merges):
        pending[t] = (mg.left >= n) + (mg.right >= n)
    ready = [
        (mg.height, leafmin[n + t], t) for t, mg in enumerate(d.merges) if pending[t] == 0
    ]
    heapq.heapify(ready)

    new_id = list(range(n)) + [-1] * len(d.merges)
    merges = []
    while ready:
        _, _, t = heapq.heappop(ready)
        mg = d.merges[t]
        a, b = mg.left, mg.right
        if leafmin[a] > leafmin[b]:
            a, b = b, a
        new_id[n + t] = n + len(merges)
        merges.append(Merge(new_id[a], new_id[b], mg.height, mg.size))
        up = parent_of.get(n + t)
        if up is not None:
            pending[up] -= 1
            if pending[up] == 0:
                heapq.heappush(ready, (d.merges[up].height, leafmin[n + up], up))
    return Dendrogram(n, tuple(merges), d.labels)


def canonical_equal(a: Dendrogram, b: Dendrogram, tol: float = 1e-9) -> bool:
    """Same canonical topology, with heights agreeing within ``tol``."""
    if a.n != b.n:
        return False
    ca, cb = canonical_form(a), canonical_form(b)
    for x, y in zip(ca.merges, cb.merges):
        if (x.left, x.right, x.size) != (y.left, y.right, y.size):
            return False
        if abs(x.height - y.height) > tol:
            return False
    return True


def max_cophenetic_deviation(a: Dendrogram, b: Dendrogram) -> float:
    if a.n != b.n:
        raise ValueError("dendrograms have different leaf counts")
    return float(np.max(np.abs(cophenetic(a) - cophenetic(b)), initial=0.0))


def check_ultrametric(D, tol: float = 0.0) -> bool:
    """True iff ``D[i, j] <= max(D[i, k], D[k, j]) + tol`` for all triples."""
    D = np.asarray(D, dtype=float)
    for k in range(D.shape[0]):
        bound = np.maximum(D[:, k][:, None], D[k, :][None, :])
        if np.any(D > bound + tol):
            return False
    return True


_NEWICK_RESERVED = re.compile(r"[\s(),:;\[\]']")


def _newick_label(label: str) -> str:
    if _NEWICK_RESERVED.search(label) or not label:
        return "'" + label.replace("'", "''") + "'"
    return label


def _fmt(x: float) -> str:
    return format(x, ".12g")


def to_newick(d: Dendrogram) -> str:
    """Newick text with branch length = parent height - child height.

    Siblings are written smallest leaf id first. Negative branch lengths (inversions) are clamped to 0 and reported with
    a :class:`UserWarning`.
    """
    if d.n == 1:
        return _newick_label(d.labels[0]) + ";"
    heights = d.node_heights()
    root = 2 * d.n - 2
    parent = {}
    leafmin = list(range(d.n))
    for t, mg in enumerate(d.merges):
        parent[mg.left] = parent[mg.right] = d.n + t
        leafmin.append(min(leafmin[mg.left], leafmin[mg.right]))
    clamped = False

    def branch(node: int) -> str:
        nonlocal clamped
        length = heights[parent[node]] - heights[node]
        if length < 0:
            clamped = True
            length = 0.0
        return ":" + _fmt(length)

    # iterative post-order: deep chains would overflow the recursion limit
    text: dict[int, str] = {}
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if node < d.n:
            text[node] = _newick_label(d.labels[node])
            continue
        a, b = d.merges[node - d.n][:2]
        if leafmin[a] > leafmin[b]:
            a, b = b, a
        if not expanded:
            stack.append((node, True))
            stack.append((b, False))
            stack.append((a, False))
            continue
        left = text.pop(a) + branch(a)
        right = text.pop(b) + branch(b)
        text[node] = f"({left},{right})"
    if clamped:
        warnings.warn("inversions present: negative branch lengths clamped to 0", stacklevel=2)
    return text[root] + ";"


TSV_HEADER = "left\tright\theight\tsize"


def merges_to_tsv(d: Dendrogram) -> str:
    buf = io.StringIO()
    buf.write(TSV_HEADER + "\n")
    for mg in d.merges:
        buf.write(f"{mg.left}\t{mg.right}\t{_fmt(mg.height)}\t{mg.size}\n")
    return buf.getvalue()


def merges_from_tsv(text: str, labels: Sequence[str] = ()) -> Dendrogram:
    rows = [(no, line) for no, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if rows and rows[0][1].strip() == TSV_HEADER:
        rows = rows[1:]
    merges = []
    for lineno, line in rows:
        parts = line.split("\t")
        if len(parts) != 4:
            raise DataError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        a, b, h, s = parts
        merges.append(Merge(int(a), int(b), float(h), int(s)))
    return Dendrogram(len(merges) + 1, tuple(merges), tuple(labels))
