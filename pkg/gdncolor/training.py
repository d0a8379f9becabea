"""Unsupervised margin loss, analytic gradients and Adam for GDN params."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import AdamConfig, LossConfig, TrainConfig
from .graph import Graph
from .model import (
    EmbeddingMatrix,
    GdnParams,
    aggregation_operator,
    forward,
    init_attributes,
    row_sums,
)
from .results import TrainingReport


logger = logging.getLogger(__name__)

LogCallback = Callable[[str, Dict[str, Any]], None]


@dataclass
class GradientRecord:
    """Loss value and its partial derivatives, shaped like ``GdnParams.values``."""

    grads: np.ndarray
    loss: float


@dataclass
class AdamState:
    """Step count and per-scalar moment estimates."""

    t: int
    m: np.ndarray
    v: np.ndarray
    config: AdamConfig

    @classmethod
    def zeros(cls, params: GdnParams, config: Optional[AdamConfig] = None) -> "AdamState":
        shape = params.values.shape
        return cls(t=0, m=np.zeros(shape), v=np.zeros(shape), config=config or AdamConfig())


def _edge_geometry(h: EmbeddingMatrix, g: Graph) -> Tuple[np.ndarray, np.ndarray]:
    diff = h[g.edges[:, 0]] - h[g.edges[:, 1]]
    return diff, np.sqrt((diff * diff).sum(axis=1))


def margin_loss(h: EmbeddingMatrix, g: Graph, cfg: Optional[LossConfig] = None) -> float:
    """Sum over edges of ``max(m - ||h_u - h_v||, 0)``."""
    cfg = cfg or LossConfig()
    if g.m == 0:
        return 0.0
    _, dist = _edge_geometry(h, g)
    return float(np.maximum(cfg.margin - dist, 0.0).sum())


def _loss_and_output_grad(h: EmbeddingMatrix, g: Graph, cfg: LossConfig) -> Tuple[float, np.ndarray]:
    grad = np.zeros_like(h)
    if g.m == 0:
        return 0.0, grad
    diff, dist = _edge_geometry(h, g)
    loss = float(np.maximum(cfg.margin - dist, 0.0).sum())

    # Kink (d == m) and coincident endpoints (d == 0) contribute nothing.
    active = (dist < cfg.margin) & (dist > 0.0)
    if active.any():
        coef = -(diff[active] / dist[active, None])
        np.add.at(grad, g.edges[active, 0], coef)
        np.add.at(grad, g.edges[active, 1], -coef)
    return loss, grad


def backward(
    g: Graph,
    x: EmbeddingMatrix,
    params: GdnParams,
    cfg: Optional[LossConfig] = None,
    *,
    aggregator: str = "sum",
    trace: Optional[List[EmbeddingMatrix]] = None,
) -> GradientRecord:
    """Exact reverse-mode gradient of the margin loss w.r.t. every scalar.

    A trace from :func:`forward` may be passed to skip the forward pass.
    """
    cfg = cfg or LossConfig()
    if trace is None:
        _, trace = forward(x, g, params, aggregator=aggregator)
    if len(trace) != params.depth:
        raise ValueError(f"trace has {len(trace)} layers, params have {params.depth}")

    op = aggregation_operator(g, aggregator)
    op_t = op.T.tocsr()
    inputs = [np.asarray(x, dtype=np.float64)] + trace[:-1]

    loss, upstream = _loss_and_output_grad(trace[-1], g, cfg)
    grads = np.zeros(params.values.shape)

    for index in range(params.depth - 1, -1, -1):
        lambda_c, gamma_c, lambda_a, gamma_a, _ = params.values[index]
        h_in = inputs[index]
        agg = np.asarray(op @ h_in)
        up_rows = upstream.sum(axis=1)

        grads[index] = (
            float((upstream * h_in).sum()),
            float((up_rows * row_sums(h_in)).sum()),
            float((upstream * agg).sum()),
            float((up_rows * row_sums(agg)).sum()),
            float(up_rows.sum()),
        )

        through_agg = lambda_a * upstream + gamma_a * up_rows[:, None]
        upstream = lambda_c * upstream + gamma_c * up_rows[:, None] + np.asarray(op_t @ through_agg)

    return GradientRecord(grads=grads, loss=loss)


def finite_diff_grad(
    g: Graph,
    x: EmbeddingMatrix,
    params: GdnParams,
    cfg: Optional[LossConfig] = None,
    step: float = 1e-6,
    *,
    aggregator: str = "sum",
) -> GradientRecord:
    """Central-difference gradient oracle, one scalar at a time."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    cfg = cfg or LossConfig()

    def loss_at(values: np.ndarray) -> float:
        final, _ = forward(x, g, GdnParams(values), aggregator=aggregator)
        return margin_loss(final, g, cfg)

    base = params.values.copy()
    grads = np.zeros(base.shape)
    for index in np.ndindex(base.shape):
        plus = base.copy()
        plus[index] += step
        minus = base.copy()
        minus[index] -= step
        grads[index] = (loss_at(plus) - loss_at(minus)) / (2.0 * step)
    return GradientRecord(grads=grads, loss=loss_at(base))


def adam_step(state: AdamState, params: GdnParams, grads: GradientRecord) -> Tuple[AdamState, GdnParams]:
    """One bias-corrected Adam update; inputs are left unchanged."""
    if grads.grads.shape != params.values.shape or state.m.shape != params.values.shape:
        raise ValueError(
            f"shape mismatch: params {params.values.shape}, grads {grads.grads.shape}, "
            f"state {state.m.shape}"
        )
    cfg = state.config
    g = grads.grads
    t = state.t + 1
    m = cfg.b1 * state.m + (1.0 - cfg.b1) * g
    v = cfg.b2 * state.v + (1.0 - cfg.b2) * g * g
    m_hat = m / (1.0 - cfg.b1 ** t)
    v_hat = v / (1.0 - cfg.b2 ** t)
    values = params.values - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.eps)
    return AdamState(t=t, m=m, v=v, config=cfg), GdnParams(values)


def calibrate_params(
    params: GdnParams, corpus: Sequence[Tuple[Graph, int]], config: Optional[TrainConfig] = None
) -> GdnParams:
    """Rescale every layer so the median edge distance over *corpus* equals the margin.

    Layers without bias are homogeneous, so scaling each layer's four
    weights by ``s`` scales the embedding by ``s ** depth``.  Params are
    returned unchanged when the corpus has no edges or every distance is 0.
    """
    config = config or TrainConfig()
    rng = np.random.default_rng(config.seed)
    distances = []
    for graph, k in corpus:
        if graph.m == 0:
            continue
        x = init_attributes(graph, k, seed=int(rng.integers(2**63 - 1)))
        h, _ = forward(x, graph, params, aggregator=config.aggregator)
        distances.append(_edge_geometry(h, graph)[1])
    if not distances:
        return params

    median = float(np.median(np.concatenate(distances)))
    if not (np.isfinite(median) and median > 0):
        logger.warning("median edge distance is %s; params left uncalibrated", median)
        return params
    scale = (config.loss.margin / median) ** (1.0 / params.depth)
    logger.debug("median edge distance %.6g; layer scale %.6g", median, scale)
    return GdnParams(params.values * scale)


def train(
    corpus: Sequence[Tuple[Graph, int]],
    params0: Optional[GdnParams] = None,
    config: Optional[TrainConfig] = None,
    *,
    corpus_descriptor: Optional[Dict[str, Any]] = None,
    log_callback: Optional[LogCallback] = None,
) -> Tuple[GdnParams, TrainingReport]:
    """Fit GDN params on ``(graph, k)`` instances, one Adam step per instance.

    Attributes are drawn afresh for every instance in every epoch from a
    seed stream derived from ``config.seed``; instances are visited in
    corpus order.  Returns the final params and a run report carrying the
    per-epoch mean loss.
    """
    if not corpus:
        raise ValueError("training corpus must not be empty")
    config = config or TrainConfig()
    config.validate()

    if params0 is not None:
        params = params0
    else:
        params = GdnParams.default(config.depth)
        if config.calibrate:
            params = calibrate_params(params, corpus, config)
    state = AdamState.zeros(params, config.adam)
    epoch_seeds = np.random.SeedSequence(config.seed).spawn(config.epochs)
    epoch_losses: List[float] = []

    for epoch, epoch_seed in enumerate(epoch_seeds, start=1):
        rng = np.random.default_rng(epoch_seed)
        losses = []
        flat = True
        for graph, k in corpus:
            x = init_attributes(graph, k, seed=int(rng.integers(2**63 - 1)))
            _, trace = forward(x, graph, params, aggregator=config.aggregator)
            record = backward(graph, x, params, config.loss, aggregator=config.aggregator, trace=trace)
            state, params = adam_step(state, params, record)
            losses.append(record.loss)
            flat = flat and not np.any(record.grads)

        if flat:
            logger.warning("epoch %d: every gradient is zero, params unchanged", epoch)
        mean_loss = float(np.mean(losses))
        epoch_losses.append(mean_loss)
        logger.info("epoch %d/%d mean loss %.6g", epoch, config.epochs, mean_loss)
        if log_callback:
            log_callback("epoch", {"epoch": epoch, "mean_loss": mean_loss})

    descriptor = corpus_descriptor or {
        "instances": len(corpus),
        "nodes": [graph.n for graph, _ in corpus],
        "colors": [int(k) for _, k in corpus],
    }
    report = TrainingReport(
        corpus=descriptor,
        seed=config.seed,
        epochs=config.epochs,
        epoch_losses=epoch_losses,
        final_params=params.to_dict(),
    )
    return params, report
