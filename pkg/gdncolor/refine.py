"""Instance reduction, local-search repair and exact completion."""

from __future__ import annotations

import heapq
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_EXACT_BUDGET
from .errors import InvariantError
from .graph import ColorAssignment, Graph, color_counts, greedy_clique


logger = logging.getLogger(__name__)

THRESHOLDS = (0.9999, 0.999, 0.99, 0.95, 0.9, 0.8)


# ── Peeling ─────────────────────────────────────────────────────────────────


@dataclass
class PeelResult:
    """Outcome of iteratively removing nodes of degree < k.

    Attributes
    ----------
    reduced:
        The remaining graph (its k-core), relabelled to dense ids.
    kept_ids:
        ``kept_ids[i]`` is the original id of reduced node ``i``.
    stack:
        Removed nodes in removal order, each with the neighbours it still
        had at the moment of removal (original ids).
    """

    reduced: Graph
    kept_ids: np.ndarray
    stack: List[Tuple[int, Tuple[int, ...]]]
    original_n: int
    k: int

    @property
    def peeled(self) -> int:
        return len(self.stack)


def preprocess_peel(g: Graph, k: int) -> PeelResult:
    """Remove nodes with current degree < k, lowest id first, until none remain."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    adjacency = g.adjacency_lists()
    degree = g.degrees.tolist()
    alive = [True] * g.n
    heap = [v for v in range(g.n) if degree[v] < k]
    heapq.heapify(heap)
    stack: List[Tuple[int, Tuple[int, ...]]] = []

    while heap:
        v = heapq.heappop(heap)
        if not alive[v]:
            continue
        alive[v] = False
        remaining = tuple(u for u in adjacency[v] if alive[u])
        stack.append((v, remaining))
        for u in remaining:
            degree[u] -= 1
            if degree[u] == k - 1:
                heapq.heappush(heap, u)

    reduced, kept = g.induced_subgraph([v for v in range(g.n) if alive[v]])
    if stack:
        logger.debug("peeled %d of %d nodes at k=%d", len(stack), g.n, k)
    return PeelResult(reduced=reduced, kept_ids=kept, stack=stack, original_n=g.n, k=k)


def reinsert(
    peel: PeelResult,
    reduced_colors: ColorAssignment,
    pins: Optional[Mapping[int, int]] = None,
) -> ColorAssignment:
    """Colour peeled nodes in reverse removal order without adding conflicts.

    Each node takes the smallest colour unused by its recorded neighbours,
    or its pinned colour when that one is free.
    """
    if reduced_colors.n != peel.reduced.n:
        raise ValueError(
            f"reduced assignment has {reduced_colors.n} entries, reduced graph {peel.reduced.n} nodes"
        )
    k = max(peel.k, reduced_colors.k)
    colors = np.full(peel.original_n, -1, dtype=np.int64)
    colors[peel.kept_ids] = reduced_colors.colors
    pins = pins or {}

    for v, neighbours in reversed(peel.stack):
        used = set()
        for u in neighbours:
            if colors[u] < 0:
                raise InvariantError(f"recorded neighbour {u} of node {v} is uncoloured at reinsertion")
            used.add(int(colors[u]))
        preferred = pins.get(v)
        if preferred is not None and preferred not in used and preferred < k:
            colors[v] = preferred
            continue
        color = next(c for c in range(k + 1) if c not in used)
        if color >= k:
            raise InvariantError(f"node {v} has {len(used)} coloured neighbours, palette {k} exhausted")
        colors[v] = color

    return ColorAssignment(colors, k)


# ── Local search ────────────────────────────────────────────────────────────


def postprocess_local_search(g: Graph, a: ColorAssignment) -> ColorAssignment:
    """Recolour and swap moves until a full sweep finds no strict improvement.

    Pass 1 visits nodes in id order and applies the first colour (ascending)
    that lowers the conflict count; pass 2 visits edges in canonical order
    and swaps endpoint colours when that lowers the count.
    """
    if a.n != g.n:
        raise ValueError(f"assignment has {a.n} entries but graph has {g.n} nodes")
    k = a.k
    colors = a.colors.tolist()
    counts = color_counts(g, a.colors, k).tolist()
    adjacency = g.adjacency_lists()
    edges = g.edges.tolist()

    def recolor(v: int, old: int, new: int) -> None:
        for w in adjacency[v]:
            counts[w][old] -= 1
            counts[w][new] += 1
        colors[v] = new

    changed = True
    sweeps = 0
    while changed:
        changed = False
        sweeps += 1

        for v in range(g.n):
            current = colors[v]
            row = counts[v]
            for r in range(k):
                if r != current and row[r] < row[current]:
                    recolor(v, current, r)
                    changed = True
                    break

        for u, v in edges:
            cu, cv = colors[u], colors[v]
            if cu == cv:
                continue
            before = counts[u][cu] + counts[v][cv]
            after = counts[u][cv] - 1 + counts[v][cu] - 1
            if after < before:
                recolor(u, cu, cv)
                recolor(v, cv, cu)
                changed = True

    logger.debug("local search converged after %d sweeps", sweeps)
    return ColorAssignment(np.asarray(colors, dtype=np.int64), k)


# ── Partial assignments and exact completion ────────────────────────────────


@dataclass
class PartialAssignment:
    """Pinned colours and forbidden colour sets per node."""

    pinned: Dict[int, int] = field(default_factory=dict)
    forbidden: Dict[int, FrozenSet[int]] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not self.pinned and not any(self.forbidden.values())

    def validate(self, n: int, k: int) -> None:
        for v, c in self.pinned.items():
            if not (0 <= v < n and 0 <= c < k):
                raise ValueError(f"pin ({v}, {c}) outside {n} nodes / {k} colours")
            if c in self.forbidden.get(v, ()):
                raise ValueError(f"node {v} is pinned to colour {c}, which is also forbidden")
        for v, colors in self.forbidden.items():
            if not 0 <= v < n:
                raise ValueError(f"forbidden entry for node {v} outside 0..{n - 1}")
            if len(colors) >= k:
                raise ValueError(f"node {v} has every colour forbidden")

    def reduction_ratio(self, n: int, k: int) -> float:
        """Share of (node, colour) cells decided: a pin settles its whole row."""
        if n == 0 or k == 0:
            return 0.0
        decided = k * len(self.pinned)
        decided += sum(len(c) for v, c in self.forbidden.items() if v not in self.pinned)
        return decided / (n * k)

    def to_json(self) -> str:
        return json.dumps(
            {
                "pins": [[v, c] for v, c in sorted(self.pinned.items())],
                "forbidden": [[v, sorted(c)] for v, c in sorted(self.forbidden.items()) if c],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PartialAssignment":
        data = json.loads(text)
        return cls(
            pinned={int(v): int(c) for v, c in data.get("pins", [])},
            forbidden={int(v): frozenset(int(c) for c in cs) for v, cs in data.get("forbidden", [])},
        )


def threshold_index(n: int, k: int) -> int:
    """Index into :data:`THRESHOLDS` from the natural log of the problem size."""
    if n * k <= 0:
        return 0
    raw = int(math.floor(math.log(n * k))) - 6
    return min(max(raw, 0), len(THRESHOLDS) - 1)


def threshold_partial(probs: np.ndarray, n: Optional[int] = None, k: Optional[int] = None) -> PartialAssignment:
    """Pin confident colours and forbid improbable ones.

    *probs* holds one probability row per node (see
    :func:`gdncolor.model.softmax_rows`).  A colour is pinned when its
    probability reaches the size-dependent threshold T and forbidden when it
    is at most ``(1 - T)²``; a node never loses every colour.
    """
    n = probs.shape[0] if n is None else n
    k = probs.shape[1] if k is None else k
    if probs.shape != (n, k):
        raise ValueError(f"probability matrix has shape {probs.shape}, expected ({n}, {k})")

    threshold = THRESHOLDS[threshold_index(n, k)]
    floor = (1.0 - threshold) ** 2
    pinned: Dict[int, int] = {}
    forbidden: Dict[int, FrozenSet[int]] = {}

    for v in range(n):
        row = probs[v]
        high = np.flatnonzero(row >= threshold)
        if high.size:
            pinned[v] = int(high[0])
        low = np.flatnonzero(row <= floor)
        if 0 < low.size < k:
            forbidden[v] = frozenset(int(c) for c in low)

    return PartialAssignment(pinned=pinned, forbidden=forbidden)


class CompletionStatus(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass
class CompletionResult:
    status: CompletionStatus
    assignment: Optional[ColorAssignment]
    expansions: int

    @property
    def solved(self) -> bool:
        return self.status is CompletionStatus.SAT


@dataclass
class _Frame:
    node: int
    candidates: List[int]
    changed: List[int]
    prev_max_used: int
    color: int = -1


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def exact_complete(
    g: Graph,
    k: int,
    pa: Optional[PartialAssignment] = None,
    budget: int = DEFAULT_EXACT_BUDGET,
    *,
    hint: Optional[ColorAssignment] = None,
) -> CompletionResult:
    """Backtracking search for a zero-conflict colouring honouring *pa*.

    Branches on the uncoloured node with the fewest remaining colours
    (ties: more uncoloured neighbours, then lower id) and prunes neighbour
    domains after every assignment.  Each colour tried counts as one
    expansion.  When *hint* is given its colour for a node is tried first.
    Without pins or forbids a greedy clique is pre-coloured 0..q-1 at no
    expansion cost.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    pa = pa or PartialAssignment()
    pa.validate(g.n, k)
    if hint is not None and hint.n != g.n:
        raise ValueError(f"hint has {hint.n} entries, graph has {g.n} nodes")

    full = (1 << k) - 1
    domain = [full] * g.n
    for v, colors in pa.forbidden.items():
        for c in colors:
            domain[v] &= ~(1 << c)
    for v, c in pa.pinned.items():
        domain[v] = 1 << c

    adjacency = g.adjacency_lists()
    free_degree = g.degrees.tolist()
    preferred = hint.colors.tolist() if hint is not None else [-1] * g.n
    colors = [-1] * g.n
    # Colour classes are interchangeable only without pins or forbids.
    symmetric = pa.is_empty()
    expansions = 0

    if g.n == 0:
        return CompletionResult(CompletionStatus.SAT, ColorAssignment(np.zeros(0, dtype=np.int64), k), 0)

    uncolored = g.n
    max_used = -1

    if symmetric:
        clique = greedy_clique(g)
        if len(clique) > k:
            return CompletionResult(CompletionStatus.UNSAT, None, 0)
        for c, v in enumerate(clique):
            colors[v] = c
            domain[v] = 1 << c
            uncolored -= 1
            for w in adjacency[v]:
                free_degree[w] -= 1
                if colors[w] < 0:
                    domain[w] &= ~(1 << c)
                    if not domain[w]:
                        return CompletionResult(CompletionStatus.UNSAT, None, 0)
        max_used = len(clique) - 1
        if uncolored == 0:
            return CompletionResult(CompletionStatus.SAT, ColorAssignment(np.asarray(colors, dtype=np.int64), k), 0)

    def select() -> int:
        best, best_key = -1, None
        for v in range(g.n):
            if colors[v] >= 0:
                continue
            key = (_popcount(domain[v]), -free_degree[v], v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        return best

    def candidates(v: int, max_used: int) -> List[int]:
        limit = min(k, max_used + 2) if symmetric else k
        options = [c for c in range(limit) if domain[v] >> c & 1]
        p = preferred[v]
        if p in options and options[0] != p:
            options.remove(p)
            options.insert(0, p)
        return options

    first = select()
    stack = [_Frame(first, candidates(first, max_used), [], max_used)]

    while stack:
        frame = stack[-1]
        if frame.color >= 0:
            bit = 1 << frame.color
            for w in frame.changed:
                domain[w] |= bit
            for w in adjacency[frame.node]:
                free_degree[w] += 1
            colors[frame.node] = -1
            uncolored += 1
            max_used = frame.prev_max_used
            frame.changed = []
            frame.color = -1

        if not frame.candidates:
            stack.pop()
            continue

        if expansions >= budget:
            return CompletionResult(CompletionStatus.BUDGET_EXCEEDED, None, expansions)
        expansions += 1

        c = frame.candidates.pop(0)
        bit = 1 << c
        v = frame.node
        colors[v] = c
        frame.color = c
        uncolored -= 1
        max_used = max(max_used, c)

        wiped = False
        for w in adjacency[v]:
            free_degree[w] -= 1
            if colors[w] < 0 and domain[w] & bit:
                domain[w] &= ~bit
                frame.changed.append(w)
                if not domain[w]:
                    wiped = True
        if wiped:
            continue

        if uncolored == 0:
            assignment = ColorAssignment(np.asarray(colors, dtype=np.int64), k)
            return CompletionResult(CompletionStatus.SAT, assignment, expansions)

        nxt = select()
        stack.append(_Frame(nxt, candidates(nxt, max_used), [], max_used))

    return CompletionResult(CompletionStatus.UNSAT, None, expansions)
