"""Multi-instance experiment drivers: benchmarks, depth sweeps, pinned colours."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..baselines import exact_chromatic, greedy_dynamic
from ..config import SolveConfig, resolve_worker_count
from ..errors import BudgetExceededError
from ..graph import Graph
from ..instances import load_instance
from ..model import GdnParams, PinSet
from ..runner import solve
from .config import BenchConfig, DepthSweepConfig
from .results import BenchReport, BenchRow, DepthSweepResult, FixedColorResult
from .utils import ManifestEntry, instance_name, mean_solved_ratio, pin_respected, read_manifest, replicate_seeds


logger = logging.getLogger(__name__)

LogCallback = Callable[[str, Dict[str, Any]], None]
Corpus = Sequence[Tuple[Graph, int]]


# ── Benchmark matrix ────────────────────────────────────────────────────────


def bench(
    manifest: Union[str, Path, Sequence[ManifestEntry]],
    config: Optional[BenchConfig] = None,
    out: Optional[Union[str, Path]] = None,
    *,
    log_callback: Optional[LogCallback] = None,
) -> BenchReport:
    """Run every configured method on every manifest instance.

    Instances are distributed over a process pool; rows come back in
    manifest order regardless of completion order.  An instance that cannot
    be read, or a method that raises, yields rows marked ``failed`` and the
    run continues.  When *out* is given the report is written there (JSON
    for a ``.json`` suffix, CSV otherwise).
    """
    config = config or BenchConfig()
    config.validate()
    entries = read_manifest(manifest) if isinstance(manifest, (str, Path)) else list(manifest)

    workers = min(resolve_worker_count(config.workers), max(len(entries), 1))
    report = BenchReport()

    if workers == 1:
        batches = (_bench_entry(entry, config) for entry in entries)
        for entry, rows in zip(entries, batches):
            report.rows.extend(rows)
            _notify(log_callback, entry, rows)
    else:
        logger.info("benchmarking %d instances on %d workers", len(entries), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_bench_entry, entry, config) for entry in entries]
            for entry, future in zip(entries, futures):
                rows = future.result()
                report.rows.extend(rows)
                _notify(log_callback, entry, rows)

    if out is not None:
        path = report.write(out)
        logger.info("wrote %d rows to %s", len(report.rows), path)
    return report


def _notify(log_callback: Optional[LogCallback], entry: ManifestEntry, rows: List[BenchRow]) -> None:
    if log_callback:
        log_callback("instance", {"instance": instance_name(entry.source), "rows": len(rows)})


def _bench_entry(entry: ManifestEntry, config: BenchConfig) -> List[BenchRow]:
    name = instance_name(entry.source)
    try:
        graph = load_instance(entry.source)
    except (OSError, ValueError) as exc:
        logger.warning("instance %s failed to load: %s", name, exc)
        return [BenchRow(name, method, status="failed", error=str(exc)) for method in config.methods]

    chi: Optional[int] = None
    if config.chi_budget > 0:
        try:
            chi, _ = exact_chromatic(graph, config.chi_budget)
        except BudgetExceededError as exc:
            logger.info("chromatic number of %s undecided: %s", name, exc)

    k = entry.k or chi or greedy_dynamic(graph).colors_used
    rows = []
    for method in config.methods:
        run_config = replace(config.solve, k=max(k, 1), method=method)
        try:
            _, report = solve(graph, run_config, instance=name)
        except (ValueError, RuntimeError, BudgetExceededError) as exc:
            logger.warning("%s on %s failed: %s", method, name, exc)
            rows.append(BenchRow(name, method, status="failed", chi=chi, error=str(exc)))
            continue
        rows.append(BenchRow(name, method, report=report, chi=chi))
    return rows


# ── Depth sweep ─────────────────────────────────────────────────────────────


def depth_sweep(
    corpus: Corpus,
    config: Optional[DepthSweepConfig] = None,
    *,
    log_callback: Optional[LogCallback] = None,
) -> DepthSweepResult:
    """Mean solved ratio of GDN models at each depth.

    Each depth runs ``config.params[depth]`` when present and the default
    initialisation otherwise.  Every depth sees the same seeds.
    """
    if not corpus:
        raise ValueError("depth sweep corpus must not be empty")
    config = config or DepthSweepConfig()
    config.validate()

    means: List[float] = []
    per_replicate: Dict[int, List[float]] = {}
    for depth in config.depths:
        params = config.params.get(depth)
        if params is None:
            params = GdnParams.default(depth)
        replicate_means = []
        for seed in replicate_seeds(config.solve.seed, config.replicates):
            reports = []
            for graph, k in corpus:
                run_config = replace(config.solve, k=k, depth=depth, seed=seed, method="gdn", params_path=None)
                _, report = solve(graph, run_config, params=params)
                reports.append(report)
            replicate_means.append(mean_solved_ratio(reports))
        per_replicate[depth] = replicate_means
        means.append(float(np.mean(replicate_means)))
        logger.info("depth %d: mean solved ratio %.4f", depth, means[-1])
        if log_callback:
            log_callback("depth", {"depth": depth, "mean_solved_ratio": means[-1]})

    return DepthSweepResult(depths=list(config.depths), mean_solved_ratio=means, per_replicate=per_replicate)


# ── Pinned-colour experiment ────────────────────────────────────────────────


def fixed_color_experiment(
    corpus: Corpus,
    cfg: SolveConfig,
    seed: int = 0,
    *,
    params: Optional[GdnParams] = None,
    log_callback: Optional[LogCallback] = None,
) -> FixedColorResult:
    """Share of graphs solved with one random node pinned to a random colour.

    A graph counts as fixed when the result has no conflicts and the pinned
    node keeps its colour.  Corpus entries are ``(graph, k)`` pairs whose
    palette is known to be feasible.
    """
    if not corpus:
        raise ValueError("fixed-colour corpus must not be empty")
    rng = np.random.default_rng(seed)
    result = FixedColorResult(fixed=0, total=len(corpus))

    for index, (graph, k) in enumerate(corpus):
        if graph.n == 0:
            raise ValueError(f"corpus graph {index} has no nodes to pin")
        node, color = int(rng.integers(graph.n)), int(rng.integers(k))
        pins = PinSet({node: color})
        assignment, report = solve(graph, replace(cfg, k=k), pins=pins, params=params)
        ok = report.conflicts == 0 and pin_respected(assignment, node, color)
        result.pins.append((node, color))
        result.outcomes.append(ok)
        result.fixed += int(ok)
        if log_callback:
            log_callback("fixed", {"index": index, "node": node, "color": color, "fixed": ok})

    logger.info("fixed %d of %d graphs", result.fixed, result.total)
    return result
