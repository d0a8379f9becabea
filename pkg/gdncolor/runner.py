"""High-level API to run colouring methods on one instance."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np

from .baselines import bp_color, greedy_dynamic, greedy_sorted, greedy_static, tabucol
from .config import SolveConfig
from .graph import ColorAssignment, Graph, count_conflicts, greedy_clique
from .model import (
    EmbeddingMatrix,
    GdnParams,
    PinSet,
    classify_argmax,
    forward,
    init_attributes,
    normalize_rows,
    softmax_rows,
)
from .refine import (
    CompletionStatus,
    PartialAssignment,
    PeelResult,
    exact_complete,
    postprocess_local_search,
    preprocess_peel,
    reinsert,
    threshold_partial,
)
from .results import SolveReport
from .support import validate_method_choice


logger = logging.getLogger(__name__)

LogCallback = Callable[[str, Dict[str, Any]], None]

_PIN_AWARE = {"gdn", "exact"}


@dataclass
class _Candidate:
    assignment: ColorAssignment
    conflicts: int
    embedding: Optional[EmbeddingMatrix] = None


class ChromaticResult(NamedTuple):
    k: int
    report: SolveReport
    assignment: ColorAssignment


class GdnSolver:
    """Coordinate peeling, the chosen method and refinement for one graph."""

    @classmethod
    def run(
        cls,
        *,
        graph: Graph,
        config: SolveConfig,
        pins: Optional[PinSet] = None,
        instance: str = "",
        params: Optional[GdnParams] = None,
        log_callback: Optional[LogCallback] = None,
    ) -> Tuple[ColorAssignment, SolveReport]:
        """Execute one colouring run and return the assignment with its report.

        *params* overrides ``config.params_path``; without either the
        default initialisation of depth ``config.depth`` is used.
        """

        config.validate()
        method = validate_method_choice(config.method, k=config.k)
        pins = pins or PinSet()
        pins.validate(graph.n, config.k)
        if pins and method not in _PIN_AWARE:
            logger.warning("method %s ignores pins except on peeled nodes", method)

        if method == "gdn" and params is None:
            params = GdnParams.load(config.params_path) if config.params_path else GdnParams.default(config.depth)

        start = time.perf_counter()

        peel: Optional[PeelResult] = None
        work, kept = graph, np.arange(graph.n)
        if config.pre:
            peel = preprocess_peel(graph, config.k)
            work, kept = peel.reduced, peel.kept_ids
        local_pins = _localise_pins(pins, kept)

        extras: Dict[str, Any] = {"restarts_used": 1}
        if work.n == 0:
            reduced = ColorAssignment(np.zeros(0, dtype=np.int64), config.k)
        elif method == "gdn":
            assert params is not None
            reduced = cls._run_gdn(work, config, params, local_pins, extras, log_callback)
        elif method == "exact":
            reduced = cls._run_exact(work, config, local_pins, extras)
        else:
            reduced = cls._run_baseline(work, config, method)
        reduced = _settle_isolated(work, reduced, local_pins)

        if peel is not None:
            assignment = reinsert(peel, reduced, pins.pins)
        else:
            assignment = reduced

        wall_ms = (time.perf_counter() - start) * 1000.0
        conflict_report = count_conflicts(graph, assignment)
        report = SolveReport(
            instance=instance,
            n=graph.n,
            m=graph.m,
            k=config.k,
            method=method,
            conflicts=conflict_report.conflicts,
            solved_ratio=conflict_report.solved_ratio,
            colors_used=assignment.colors_used,
            restarts_used=extras["restarts_used"],
            wall_ms=wall_ms,
            seed=config.seed,
            params_fingerprint=params.fingerprint() if method == "gdn" and params is not None else None,
            peeled=peel.peeled if peel is not None else 0,
            hybrid_reduction=extras.get("hybrid_reduction"),
            hybrid_status=extras.get("hybrid_status"),
        )

        logger.info(
            "%s k=%d method=%s conflicts=%d (%.1f ms)",
            instance or "<graph>", config.k, method, report.conflicts, wall_ms,
        )
        if log_callback:
            log_callback("solved", report.to_dict())
        return assignment, report

    # ── Methods ─────────────────────────────────────────────────────────────

    @classmethod
    def _run_gdn(
        cls,
        g: Graph,
        config: SolveConfig,
        params: GdnParams,
        pins: PinSet,
        extras: Dict[str, Any],
        log_callback: Optional[LogCallback],
    ) -> ColorAssignment:
        best: Optional[_Candidate] = None
        seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

        for restart, child in enumerate(seeds, start=1):
            seed = int(child.generate_state(1, dtype=np.uint64)[0])
            x = init_attributes(g, config.k, pins, seed, mode=config.attribute_mode)
            h, _ = forward(x, g, params, aggregator=config.aggregator, pins=pins, clamp=config.pin_clamp)
            candidate = classify_argmax(h)
            if config.post:
                candidate = postprocess_local_search(g, candidate)
            conflicts = count_conflicts(g, candidate).conflicts
            logger.debug("restart %d/%d: %d conflicts", restart, config.restarts, conflicts)
            if log_callback:
                log_callback("restart", {"restart": restart, "conflicts": conflicts})

            if best is None or conflicts < best.conflicts:
                best = _Candidate(candidate, conflicts, h)
            extras["restarts_used"] = restart
            if conflicts == 0:
                break

        assert best is not None
        if config.hybrid and best.conflicts > 0 and best.embedding is not None:
            return cls._hybrid_complete(g, config, best, pins, extras)
        return best.assignment

    @classmethod
    def _hybrid_complete(
        cls,
        g: Graph,
        config: SolveConfig,
        best: _Candidate,
        pins: PinSet,
        extras: Dict[str, Any],
    ) -> ColorAssignment:
        assert best.embedding is not None
        probs = softmax_rows(normalize_rows(best.embedding) / config.hybrid_temperature)
        thresholded = _release_conflicts(g, threshold_partial(probs), best.assignment)
        partial = _merge_pins(thresholded, pins)
        extras["hybrid_reduction"] = partial.reduction_ratio(g.n, config.k)

        base = _merge_pins(PartialAssignment(), pins)
        hint = best.assignment
        if partial == base:
            result = exact_complete(g, config.k, base, config.exact_budget, hint=hint)
        else:
            # Half the budget for the thresholded attempt, the rest for the retry.
            first_budget = max(config.exact_budget // 2, 1)
            result = exact_complete(g, config.k, partial, first_budget, hint=hint)
            if not result.solved:
                logger.warning(
                    "thresholded partial assignment ended %s; retrying from the pins alone", result.status.value
                )
                remaining = max(config.exact_budget - result.expansions, 1)
                result = exact_complete(g, config.k, base, remaining, hint=hint)

        extras["hybrid_status"] = result.status.value
        if result.solved:
            assert result.assignment is not None
            return result.assignment
        logger.info("exact completion ended %s; keeping the heuristic result", result.status.value)
        return best.assignment

    @classmethod
    def _run_exact(cls, g: Graph, config: SolveConfig, pins: PinSet, extras: Dict[str, Any]) -> ColorAssignment:
        result = exact_complete(g, config.k, _merge_pins(PartialAssignment(), pins), config.exact_budget)
        extras["hybrid_status"] = result.status.value
        if result.solved:
            assert result.assignment is not None
            return result.assignment
        logger.warning("exact search ended %s at k=%d; falling back to dynamic greedy", result.status.value, config.k)
        return greedy_dynamic(g, config.k)

    @classmethod
    def _run_baseline(cls, g: Graph, config: SolveConfig, method: str) -> ColorAssignment:
        k = config.k
        if method == "greedy-static":
            return greedy_static(g, k)
        if method == "greedy-sorted":
            return greedy_sorted(g, k)
        if method == "greedy-dynamic":
            return greedy_dynamic(g, k)
        if method == "tabucol":
            tabu = replace(config.tabu, seed=config.seed)
            return tabucol(g, k, tabu, greedy_dynamic(g, k))
        if method in ("bp", "bp-greedy"):
            decode = "greedy" if method == "bp-greedy" else "refutation"
            return bp_color(g, k, config.bp.sweeps, config.bp.damping, config.seed, decode=decode)
        raise ValueError(f"Unsupported method '{method}'")


def _localise_pins(pins: PinSet, kept: np.ndarray) -> PinSet:
    position = {int(v): i for i, v in enumerate(kept.tolist())}
    return PinSet({position[v]: c for v, c in pins.pins.items() if v in position})


def _settle_isolated(g: Graph, assignment: ColorAssignment, pins: PinSet) -> ColorAssignment:
    """Isolated nodes take their pinned colour, otherwise colour 0."""
    isolated = np.flatnonzero(g.degrees == 0)
    if isolated.size == 0:
        return assignment
    colors = assignment.colors.copy()
    for v in isolated.tolist():
        colors[v] = pins.pins.get(v, 0)
    return ColorAssignment(colors, assignment.k)


def _merge_pins(partial: PartialAssignment, pins: PinSet) -> PartialAssignment:
    pinned = dict(partial.pinned)
    forbidden = dict(partial.forbidden)
    for v, c in pins.pins.items():
        pinned[v] = c
        if v in forbidden:
            forbidden[v] = frozenset(forbidden[v] - {c})
    return PartialAssignment(pinned=pinned, forbidden=forbidden)


def _release_conflicts(g: Graph, partial: PartialAssignment, assignment: ColorAssignment) -> PartialAssignment:
    """Free conflicted endpoints and adjacent nodes pinned alike of their pins and forbids."""
    released = set()
    colors = assignment.colors
    pinned = partial.pinned
    for u, v in g.edges.tolist():
        if colors[u] == colors[v]:
            released.update((u, v))
        elif u in pinned and v in pinned and pinned[u] == pinned[v]:
            released.update((u, v))
    if not released:
        return partial
    logger.debug("released %d thresholded pins on conflicted nodes", len(released & pinned.keys()))
    return PartialAssignment(
        pinned={v: c for v, c in pinned.items() if v not in released},
        forbidden={v: c for v, c in partial.forbidden.items() if v not in released},
    )


def solve(
    g: Graph,
    cfg: SolveConfig,
    *,
    pins: Optional[PinSet] = None,
    instance: str = "",
    params: Optional[GdnParams] = None,
    log_callback: Optional[LogCallback] = None,
) -> Tuple[ColorAssignment, SolveReport]:
    """Functional entry point for :meth:`GdnSolver.run`."""
    return GdnSolver.run(
        graph=g, config=cfg, pins=pins, instance=instance, params=params, log_callback=log_callback
    )


def chromatic_search(
    g: Graph,
    cfg: SolveConfig,
    k_start: Optional[int] = None,
    *,
    instance: str = "",
    params: Optional[GdnParams] = None,
    log_callback: Optional[LogCallback] = None,
) -> ChromaticResult:
    """Smallest k at which the configured method reaches zero conflicts.

    Starts from *k_start* (default: the size of a greedy clique) and
    increases k by one.  At ``max_degree + 1`` a dynamic greedy colouring
    is used if the method still leaves conflicts, so the search always ends.
    """
    if k_start is not None and k_start < 1:
        raise ValueError(f"k_start must be >= 1, got {k_start}")

    if g.m == 0:
        k_min = 1 if g.n else 0
        assignment = ColorAssignment(np.zeros(g.n, dtype=np.int64), 1)
        report = _fallback_report(g, replace(cfg, k=1), assignment, instance, "greedy-static")
        return ChromaticResult(k_min, report, assignment)

    k = k_start if k_start is not None else len(greedy_clique(g))
    k = max(k, 2)
    upper = g.max_degree + 1

    while True:
        assignment, report = solve(
            g, replace(cfg, k=k), instance=instance, params=params, log_callback=log_callback
        )
        if report.conflicts == 0:
            return ChromaticResult(k, report, assignment)
        if k >= upper:
            assignment = greedy_dynamic(g, k)
            logger.info("k=%d reached the degree bound; using dynamic greedy", k)
            return ChromaticResult(k, _fallback_report(g, replace(cfg, k=k), assignment, instance, "greedy-dynamic"), assignment)
        k += 1


def _fallback_report(
    g: Graph, cfg: SolveConfig, assignment: ColorAssignment, instance: str, method: str
) -> SolveReport:
    conflicts = count_conflicts(g, assignment)
    return SolveReport(
        instance=instance,
        n=g.n,
        m=g.m,
        k=cfg.k,
        method=method,
        conflicts=conflicts.conflicts,
        solved_ratio=conflicts.solved_ratio,
        colors_used=assignment.colors_used,
        restarts_used=0,
        wall_ms=0.0,
        seed=cfg.seed,
    )

