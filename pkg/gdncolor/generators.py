"""Random and structured instance generators."""

from __future__ import annotations

import logging
from collections import defaultdict
from typing import Dict, Optional, Set, Tuple

import numpy as np

from .errors import GenerationError
from .graph import Graph


logger = logging.getLogger(__name__)

REGULAR_RESTARTS = 200


def gen_random_regular(n: int, d: int, seed: int, *, max_restarts: int = REGULAR_RESTARTS) -> Graph:
    """Sample a simple d-regular graph on n nodes with the pairing model.

    Stubs are shuffled and paired; pairs that would form a self-loop or a
    repeated edge go back into the pool and are re-paired.  When the pool
    can no longer yield a valid edge the attempt restarts from scratch.
    """
    if (n * d) % 2:
        raise ValueError(f"n*d must be even, got n={n}, d={d}")
    if not 0 <= d < n:
        raise ValueError(f"degree must satisfy 0 <= d < n, got d={d}, n={n}")

    rng = np.random.default_rng(seed)
    for attempt in range(1, max_restarts + 1):
        edges = _try_pairing(n, d, rng)
        if edges is not None:
            if attempt > 1:
                logger.debug("random regular graph n=%d d=%d accepted after %d attempts", n, d, attempt)
            return Graph.from_edges(n, sorted(edges))

    raise GenerationError(
        f"pairing model failed for n={n}, d={d}", seed=seed, attempts=max_restarts
    )


def _try_pairing(n: int, d: int, rng: np.random.Generator) -> Optional[Set[Tuple[int, int]]]:
    edges: Set[Tuple[int, int]] = set()
    stubs = np.repeat(np.arange(n), d)

    while stubs.size:
        rejected: Dict[int, int] = defaultdict(int)
        shuffled = rng.permutation(stubs).tolist()
        for s1, s2 in zip(shuffled[0::2], shuffled[1::2]):
            if s1 > s2:
                s1, s2 = s2, s1
            if s1 != s2 and (s1, s2) not in edges:
                edges.add((s1, s2))
            else:
                rejected[s1] += 1
                rejected[s2] += 1

        if not _can_still_pair(edges, rejected):
            return None
        stubs = np.asarray(
            [node for node, count in sorted(rejected.items()) for _ in range(count)],
            dtype=np.int64,
        )
    return edges


def _can_still_pair(edges: Set[Tuple[int, int]], rejected: Dict[int, int]) -> bool:
    if not rejected:
        return True
    nodes = sorted(rejected)
    for i, s1 in enumerate(nodes):
        for s2 in nodes[i + 1:]:
            if (s1, s2) not in edges:
                return True
    return False


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, p): every pair is an edge independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    keep = rng.random(len(rows)) < p
    return Graph.from_edges(n, np.column_stack([rows[keep], cols[keep]]))


def gen_queen(rows: int, cols: int) -> Graph:
    """Queen graph: squares of a rows×cols board attacking along lines and diagonals."""
    if rows < 1 or cols < 1:
        raise ValueError(f"board must be at least 1x1, got {rows}x{cols}")
    edges = []
    for a in range(rows * cols):
        ra, ca = divmod(a, cols)
        for b in range(a + 1, rows * cols):
            rb, cb = divmod(b, cols)
            if ra == rb or ca == cb or abs(ra - rb) == abs(ca - cb):
                edges.append((a, b))
    return Graph.from_edges(rows * cols, edges)


def gen_mycielski(order: int) -> Graph:
    """Mycielski graph ``myciel<order>`` with chromatic number ``order + 1``.

    ``myciel2`` is the 5-cycle; each further order applies the Mycielski
    construction once (myciel5: 47 nodes, 236 edges).
    """
    if order < 1:
        raise ValueError(f"Mycielski order must be >= 1, got {order}")
    n = 2
    edges = [(0, 1)]
    for _ in range(order - 1):
        shadow = [(u, v + n) for u, v in edges] + [(v, u + n) for u, v in edges]
        apex = [(n + i, 2 * n) for i in range(n)]
        edges = edges + shadow + apex
        n = 2 * n + 1
    return Graph.from_edges(n, edges)


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError(f"a cycle needs at least 3 nodes, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def gen_path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_complete(n: int) -> Graph:
    rows, cols = np.triu_indices(n, k=1)
    return Graph.from_edges(n, np.column_stack([rows, cols]))


def gen_star(leaves: int) -> Graph:
    """Star K_{1,leaves} with the centre at node 0."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def gen_petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)
