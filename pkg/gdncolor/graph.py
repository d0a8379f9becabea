"""Immutable graph and colour-assignment types plus conflict accounting."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from .results import ConflictReport


EdgeLike = Union[np.ndarray, Iterable[Tuple[int, int]]]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on dense node ids ``0 .. n-1``.

    Edges are stored canonically as ``(min, max)`` pairs sorted
    lexicographically; adjacency is kept in compressed form
    (``indptr`` offsets into ``indices``) with sorted neighbour lists.
    Build instances through :meth:`from_edges`.
    """

    n: int
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges: EdgeLike = (), *, strict: bool = False) -> "Graph":
        """Build a graph from unordered pairs.

        Reversed and repeated pairs are collapsed unless *strict* is set,
        in which case they raise ``ValueError``.
        """
        if n < 0:
            raise ValueError(f"node count must be non-negative, got {n}")

        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if pairs.size == 0:
            pairs = np.zeros((0, 2), dtype=np.int64)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ValueError(f"edges must be pairs, got array of shape {pairs.shape}")

        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise ValueError(f"edge endpoint out of range 0..{n - 1}")
        loops = pairs[:, 0] == pairs[:, 1]
        if loops.any():
            node = int(pairs[loops][0, 0])
            raise ValueError(f"self-loop on node {node} is not allowed")

        canonical = np.sort(pairs, axis=1)
        unique = np.unique(canonical, axis=0) if len(canonical) else canonical
        if strict and len(unique) != len(canonical):
            raise ValueError(
                f"{len(canonical) - len(unique)} duplicate or reversed edge(s) in strict mode"
            )

        src = np.concatenate([unique[:, 0], unique[:, 1]])
        dst = np.concatenate([unique[:, 1], unique[:, 0]])
        order = np.lexsort((dst, src))
        indices = dst[order]
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])

        return cls(
            n=int(n),
            edges=_readonly(unique.astype(np.int64)),
            indptr=_readonly(indptr),
            indices=_readonly(indices.astype(np.int64)),
        )

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls.from_edges(n, ())

    @property
    def m(self) -> int:
        return int(len(self.edges))

    @cached_property
    def degrees(self) -> np.ndarray:
        return _readonly(np.diff(self.indptr))

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbour ids of node *v*."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency_lists(self) -> list:
        """Python lists of neighbours, for tight pure-Python loops."""
        return [self.indices[self.indptr[v]:self.indptr[v + 1]].tolist() for v in range(self.n)]

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix in CSR form (float64)."""
        data = np.ones(len(self.indices), dtype=np.float64)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        pos = np.searchsorted(row, v)
        return bool(pos < len(row) and row[pos] == v)

    def induced_subgraph(self, nodes: Sequence[int]) -> Tuple["Graph", np.ndarray]:
        """Return the subgraph induced by *nodes* and the new-id → old-id map."""
        kept = np.asarray(sorted(set(int(v) for v in nodes)), dtype=np.int64)
        relabel = np.full(self.n, -1, dtype=np.int64)
        relabel[kept] = np.arange(len(kept))
        mask = (relabel[self.edges[:, 0]] >= 0) & (relabel[self.edges[:, 1]] >= 0)
        sub_edges = relabel[self.edges[mask]]
        return Graph.from_edges(len(kept), sub_edges), kept

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class ColorAssignment:
    """Per-node colour indices drawn from a palette of size *k*."""

    colors: np.ndarray
    k: int

    def __post_init__(self) -> None:
        colors = np.array(self.colors, dtype=np.int64).reshape(-1)
        if self.k < 1:
            raise ValueError(f"palette size must be at least 1, got {self.k}")
        if colors.size and (colors.min() < 0 or colors.max() >= self.k):
            bad = int(colors[(colors < 0) | (colors >= self.k)][0])
            raise ValueError(f"colour {bad} outside palette 0..{self.k - 1}")
        object.__setattr__(self, "colors", _readonly(colors))

    @property
    def n(self) -> int:
        return int(len(self.colors))

    @property
    def colors_used(self) -> int:
        return int(len(np.unique(self.colors)))

    def relabel(self, perm: Sequence[int]) -> "ColorAssignment":
        """Apply a colour bijection: new colour of v is ``perm[colors[v]]``."""
        table = np.asarray(perm, dtype=np.int64)
        return ColorAssignment(table[self.colors], self.k)

    def to_list(self) -> list:
        return self.colors.tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColorAssignment):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.colors, other.colors)

    def __hash__(self) -> int:
        return hash((self.k, self.colors.tobytes()))


def count_conflicts(g: Graph, a: ColorAssignment) -> ConflictReport:
    """Count monochromatic edges of *a* on *g*."""
    if a.n != g.n:
        raise ValueError(f"assignment has {a.n} entries but graph has {g.n} nodes")

    colors = a.colors
    mono = colors[g.edges[:, 0]] == colors[g.edges[:, 1]]
    conflicts = int(mono.sum())
    ratio = 1.0 - conflicts / g.m if g.m else 1.0
    return ConflictReport(
        conflicts=conflicts,
        solved_ratio=ratio,
        conflict_edges=[tuple(e) for e in g.edges[mono].tolist()],
    )


def is_proper_coloring(g: Graph, a: ColorAssignment) -> bool:
    """Direct neighbour scan; independent of :func:`count_conflicts`."""
    if a.n != g.n:
        raise ValueError(f"assignment has {a.n} entries but graph has {g.n} nodes")
    colors = a.colors.tolist()
    for v, nbrs in enumerate(g.adjacency_lists()):
        for u in nbrs:
            if colors[u] == colors[v]:
                return False
    return True


def color_counts(g: Graph, colors: np.ndarray, k: int) -> np.ndarray:
    """``counts[v, c]`` = number of neighbours of v holding colour c."""
    one_hot = np.zeros((g.n, k), dtype=np.int64)
    if g.n:
        one_hot[np.arange(g.n), colors] = 1
    return np.asarray(g.adjacency @ one_hot).astype(np.int64)


def greedy_clique(g: Graph) -> List[int]:
    """A maximal clique grown greedily from every node; the largest is returned."""
    adjacency = [set(nbrs) for nbrs in g.adjacency_lists()]
    degrees = g.degrees.tolist()
    best: List[int] = []
    for start in sorted(range(g.n), key=lambda v: (-degrees[v], v)):
        if degrees[start] + 1 <= len(best):
            break
        clique = [start]
        pool = sorted(adjacency[start], key=lambda v: (-degrees[v], v))
        for v in pool:
            if all(v in adjacency[u] for u in clique):
                clique.append(v)
        if len(clique) > len(best):
            best = clique
    return sorted(best)
