"""Reference colouring methods: greedy orders, Tabucol, BP and an exact oracle."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_EXACT_BUDGET, TabuConfig
from .errors import BudgetExceededError
from .graph import ColorAssignment, Graph, color_counts, count_conflicts, greedy_clique
from .refine import CompletionStatus, exact_complete


logger = logging.getLogger(__name__)


# ── Greedy ──────────────────────────────────────────────────────────────────


def _first_fit(g: Graph, order: Sequence[int], k: Optional[int]) -> ColorAssignment:
    adjacency = g.adjacency_lists()
    colors = [-1] * g.n
    for v in order:
        taken = [colors[u] for u in adjacency[v] if colors[u] >= 0]
        used = set(taken)
        color = 0
        while color in used:
            color += 1
        if k is not None and color >= k:
            # No free colour within the cap: least-conflicting, lowest index.
            clashes = [0] * k
            for c in taken:
                clashes[c] += 1
            color = min(range(k), key=lambda c: (clashes[c], c))
        colors[v] = color
    palette = k if k is not None else max(colors, default=0) + 1
    return ColorAssignment(np.asarray(colors, dtype=np.int64), palette)


def greedy_static(g: Graph, k: Optional[int] = None) -> ColorAssignment:
    """First-fit in node-id order; *k* = None leaves the palette unbounded."""
    return _first_fit(g, range(g.n), k)


def greedy_sorted(g: Graph, k: Optional[int] = None) -> ColorAssignment:
    """First-fit in descending degree order (ties: lower id)."""
    order = sorted(range(g.n), key=lambda v: (-int(g.degrees[v]), v))
    return _first_fit(g, order, k)


def greedy_dynamic(g: Graph, k: Optional[int] = None) -> ColorAssignment:
    """First-fit, always picking the uncoloured node of largest residual degree."""
    residual = g.degrees.astype(np.int64).copy()
    done = np.zeros(g.n, dtype=bool)
    order: List[int] = []
    for _ in range(g.n):
        masked = np.where(done, -1, residual)
        v = int(np.argmax(masked))
        order.append(v)
        done[v] = True
        residual[g.neighbors(v)] -= 1
    return _first_fit(g, order, k)


# ── Tabucol ─────────────────────────────────────────────────────────────────


class TabuSearch:
    """Single-move tabu search over a fixed palette.

    ``tabu[v, c]`` holds the first iteration at which moving v back to
    colour c is allowed again.
    """

    def __init__(self, g: Graph, k: int, init: ColorAssignment, config: Optional[TabuConfig] = None) -> None:
        if k < 2:
            raise ValueError(f"tabu search needs k >= 2, got {k}")
        if init.n != g.n:
            raise ValueError(f"initial assignment has {init.n} entries but graph has {g.n} nodes")
        if init.k > k:
            raise ValueError(f"initial assignment uses palette {init.k} > k={k}")
        self.g = g
        self.k = k
        self.config = config or TabuConfig()
        self.rng = np.random.default_rng(self.config.seed)
        self.colors = init.colors.copy()
        self.gamma = color_counts(g, self.colors, k)
        self.tabu = np.zeros((g.n, k), dtype=np.int64)
        self.conflicts = count_conflicts(g, ColorAssignment(self.colors, k)).conflicts
        self.best_colors = self.colors.copy()
        self.best_conflicts = self.conflicts
        self.iteration = 0
        self.best_history: List[int] = []

    def step(self) -> bool:
        """Perform one iteration; return False when no conflicted node remains."""
        n_idx = np.arange(self.g.n)
        own = self.gamma[n_idx, self.colors]
        candidates = np.flatnonzero(own > 0)
        if candidates.size == 0:
            return False

        block = self.gamma[candidates]
        current = own[candidates]
        delta = block - current[:, None]
        allowed = (self.tabu[candidates] <= self.iteration) | (self.conflicts + delta < self.best_conflicts)
        allowed[np.arange(candidates.size), self.colors[candidates]] = False

        if allowed.any():
            scores = np.where(allowed, delta, np.iinfo(np.int64).max)
            best = np.argwhere(scores == scores.min())
            row, color = best[self.rng.integers(len(best))]
            v = int(candidates[row])
            old = int(self.colors[v])
            neighbours = self.g.neighbors(v)
            self.gamma[neighbours, old] -= 1
            self.gamma[neighbours, color] += 1
            self.colors[v] = color
            self.conflicts += int(delta[row, color])
            tenure = int(self.config.tenure_factor * self.conflicts)
            tenure += int(self.rng.integers(0, self.config.tenure_random + 1))
            self.tabu[v, old] = self.iteration + tenure

            if self.conflicts < self.best_conflicts:
                self.best_conflicts = self.conflicts
                self.best_colors = self.colors.copy()

        self.iteration += 1
        self.best_history.append(self.best_conflicts)
        return True

    def run(self, iteration_limit: int) -> ColorAssignment:
        while self.best_conflicts > 0 and self.iteration < iteration_limit:
            if not self.step():
                break
        logger.debug(
            "tabucol stopped after %d iterations with %d conflicts", self.iteration, self.best_conflicts
        )
        return ColorAssignment(self.best_colors.copy(), self.k)


def tabucol(
    g: Graph,
    k: int,
    cfg: Optional[TabuConfig] = None,
    init: Optional[ColorAssignment] = None,
) -> ColorAssignment:
    """Tabu search from *init* (default: capped greedy); returns the best colouring seen."""
    cfg = cfg or TabuConfig()
    if init is None:
        init = greedy_dynamic(g, k)
    search = TabuSearch(g, k, init, cfg)
    return search.run(cfg.resolve_iterations(g.n))


# ── Belief propagation ──────────────────────────────────────────────────────


@dataclass
class BpMessages:
    """Refutation messages, one length-k vector per directed edge.

    Row ``p`` is aligned with the adjacency slot ``g.indices[p]`` of node u:
    it is the message sent along edge {u, v} to u, where v = ``g.indices[p]``.
    """

    values: np.ndarray

    @classmethod
    def uniform(cls, g: Graph, k: int) -> "BpMessages":
        return cls(np.full((len(g.indices), k), 1.0 / k))

    @classmethod
    def random(cls, g: Graph, k: int, rng: np.random.Generator, spread: float = 0.1) -> "BpMessages":
        draws = rng.standard_exponential((len(g.indices), k))
        noise = draws / draws.sum(axis=1, keepdims=True)
        return cls((1.0 - spread) / k + spread * noise)

    def toward(self, g: Graph, u: int, v: int) -> np.ndarray:
        """Message on edge {u, v} sent to u."""
        row = g.neighbors(u)
        return self.values[g.indptr[u] + int(np.searchsorted(row, v))]


def _reverse_slots(g: Graph) -> np.ndarray:
    source = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    keys = source * g.n + g.indices
    return np.searchsorted(keys, g.indices * g.n + source)


def bp_update(g: Graph, k: int, msgs: BpMessages) -> BpMessages:
    """One synchronous sweep of the colouring BP update.

    The message to u along {u, v} is the product, over v's other
    neighbours v', of ``1 - η_{{v,v'}→v}``, normalised over colours.
    Rows whose normaliser vanishes become uniform.
    """
    old = msgs.values
    if old.shape != (len(g.indices), k):
        raise ValueError(f"messages have shape {old.shape}, expected ({len(g.indices)}, {k})")
    new = np.empty_like(old)
    reverse = _reverse_slots(g)

    for v in range(g.n):
        lo, hi = int(g.indptr[v]), int(g.indptr[v + 1])
        if lo == hi:
            continue
        keep = 1.0 - old[lo:hi]
        prefix = np.vstack([np.ones((1, k)), np.cumprod(keep, axis=0)[:-1]])
        suffix = np.vstack([np.cumprod(keep[::-1], axis=0)[-2::-1], np.ones((1, k))])
        leave_one_out = prefix * suffix
        totals = leave_one_out.sum(axis=1, keepdims=True)
        safe = totals[:, 0] > 0
        out = np.full_like(leave_one_out, 1.0 / k)
        out[safe] = leave_one_out[safe] / totals[safe]
        new[reverse[lo:hi]] = out

    return BpMessages(new)


def bp_beliefs(g: Graph, k: int, msgs: BpMessages) -> np.ndarray:
    """Log-belief per node and colour: ``Σ log(1 - η)`` over incoming messages."""
    return _sum_incoming(g, k, np.log(np.clip(1.0 - msgs.values, 1e-300, None)))


def bp_refutations(g: Graph, k: int, msgs: BpMessages) -> np.ndarray:
    """Total log-refutation per node and colour: ``Σ log η`` over incoming messages."""
    return _sum_incoming(g, k, np.log(np.clip(msgs.values, 1e-300, None)))


def _sum_incoming(g: Graph, k: int, per_slot: np.ndarray) -> np.ndarray:
    totals = np.zeros((g.n, k))
    if len(g.indices):
        source = np.repeat(np.arange(g.n), g.degrees)
        np.add.at(totals, source, per_slot)
    return totals


def bp_decode(g: Graph, k: int, msgs: BpMessages) -> ColorAssignment:
    """Each node takes the colour its neighbours refute least; ties go to the lowest index."""
    refutations = bp_refutations(g, k, msgs)
    return ColorAssignment(np.argmin(refutations, axis=1).astype(np.int64), k)


def _bp_greedy_decode(g: Graph, k: int, msgs: BpMessages) -> ColorAssignment:
    beliefs = bp_beliefs(g, k, msgs)
    probs = np.exp(beliefs - beliefs.max(axis=1, keepdims=True))
    probs /= probs.sum(axis=1, keepdims=True)
    confidence = probs.max(axis=1)
    order = sorted(range(g.n), key=lambda v: (-confidence[v], v))

    adjacency = g.adjacency_lists()
    colors = [-1] * g.n
    for v in order:
        clashes = [0] * k
        for u in adjacency[v]:
            if colors[u] >= 0:
                clashes[colors[u]] += 1
        colors[v] = min(range(k), key=lambda c: (clashes[c], -probs[v, c], c))
    return ColorAssignment(np.asarray(colors, dtype=np.int64), k)


BP_DECODERS = ("refutation", "greedy")


def bp_color(
    g: Graph,
    k: int,
    sweeps: int = 100,
    damping: float = 0.5,
    seed: int = 0,
    *,
    decode: str = "refutation",
) -> ColorAssignment:
    """Damped BP from slightly perturbed uniform messages, then decoding.

    ``decode="refutation"`` is :func:`bp_decode`.  ``decode="greedy"``
    visits nodes from the most to the least confident belief; each takes
    its most believed colour among those unused by already decoded
    neighbours (the least-conflicting one when none is free).
    """
    if sweeps < 1:
        raise ValueError(f"sweeps must be >= 1, got {sweeps}")
    if not 0.0 <= damping < 1.0:
        raise ValueError(f"damping must lie in [0, 1), got {damping}")
    if decode not in BP_DECODERS:
        raise ValueError(f"decode must be one of {', '.join(BP_DECODERS)}, got {decode!r}")
    if g.n == 0:
        return ColorAssignment(np.zeros(0, dtype=np.int64), k)

    rng = np.random.default_rng(seed)
    msgs = BpMessages.random(g, k, rng)
    for _ in range(sweeps):
        updated = bp_update(g, k, msgs)
        msgs = BpMessages(damping * msgs.values + (1.0 - damping) * updated.values)

    if decode == "greedy":
        return _bp_greedy_decode(g, k, msgs)
    return bp_decode(g, k, msgs)


# ── Exact oracle ────────────────────────────────────────────────────────────


def exact_chromatic(g: Graph, budget: int = DEFAULT_EXACT_BUDGET) -> Tuple[int, ColorAssignment]:
    """Chromatic number and a proper witness colouring.

    Bounds come from a greedy clique (lower) and dynamic greedy (upper);
    every k in between is settled with :func:`exact_complete`.  Raises
    :class:`BudgetExceededError` with the tightest bounds found when the
    shared budget runs out.
    """
    if g.n == 0:
        return 0, ColorAssignment(np.zeros(0, dtype=np.int64), 1)

    lower = max(len(greedy_clique(g)), 1)
    witness = greedy_dynamic(g)
    upper = witness.colors_used
    witness = ColorAssignment(witness.colors, upper)
    remaining = budget
    spent = 0

    for k in range(lower, upper):
        result = exact_complete(g, k, None, remaining)
        remaining -= result.expansions
        spent += result.expansions
        if result.status is CompletionStatus.SAT:
            assert result.assignment is not None
            return k, result.assignment
        if result.status is CompletionStatus.BUDGET_EXCEEDED:
            raise BudgetExceededError(
                "exact search budget exhausted",
                lower=k,
                upper=upper,
                witness=witness,
                expansions=spent,
            )
        logger.debug("k=%d infeasible (%d expansions)", k, result.expansions)

    return upper, witness
