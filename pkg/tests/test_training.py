import json
import logging

import numpy as np
import pytest

from gdncolor import (
    AdamConfig,
    ColorPermutation,
    GdnParams,
    Graph,
    LossConfig,
    TrainConfig,
    adam_step,
    backward,
    calibrate_params,
    finite_diff_grad,
    forward,
    init_attributes,
    margin_loss,
    permute_colors,
    train,
)
from gdncolor.generators import gen_cycle, gen_gnp, gen_path
from gdncolor.training import AdamState, GradientRecord


def _params(seed: int, depth: int = 3, scale: float = 0.3) -> GdnParams:
    rng = np.random.default_rng(seed)
    values = rng.normal(scale=scale, size=(depth, 5))
    values[:, 0] += 1.0
    values[:, 2] -= 1.0
    return GdnParams(values)


# ── Loss ────────────────────────────────────────────────────────────────────


class TestMarginLoss:
    def test_single_edge(self):
        g = gen_path(2)
        h = np.array([[0.25, -0.25], [-0.25, 0.25]])
        assert margin_loss(h, g) == pytest.approx(1.0 - np.sqrt(0.5))

    def test_far_apart_edges_cost_nothing(self):
        g = gen_path(3)
        h = np.array([[2.0, 0.0], [0.0, 0.0], [2.0, 0.0]])
        assert margin_loss(h, g) == 0.0

    def test_coincident_endpoints_cost_margin(self):
        h = np.zeros((3, 2))
        assert margin_loss(h, gen_path(3), LossConfig(margin=0.5)) == pytest.approx(1.0)

    def test_no_edges(self):
        assert margin_loss(np.ones((4, 3)), Graph.empty(4)) == 0.0

    @pytest.mark.parametrize("seed", range(3))
    def test_invariant_under_colour_permutation(self, seed):
        g = gen_gnp(15, 0.3, seed=seed)
        rng = np.random.default_rng(seed)
        h = rng.normal(scale=0.4, size=(g.n, 4))
        perm = ColorPermutation.random(4, rng)
        assert margin_loss(permute_colors(h, perm), g) == pytest.approx(margin_loss(h, g), rel=1e-12)

    def test_margin_must_be_positive(self):
        with pytest.raises(ValueError, match="margin"):
            LossConfig(margin=0.0).validate()


# ── Gradients ───────────────────────────────────────────────────────────────


class TestBackward:
    @pytest.mark.parametrize("aggregator", ["sum", "mean"])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_finite_differences(self, aggregator, seed):
        g = gen_gnp(10, 0.3, seed=seed)
        x = init_attributes(g, 3, seed=seed)
        params = _params(seed)

        analytic = backward(g, x, params, aggregator=aggregator)
        numeric = finite_diff_grad(g, x, params, aggregator=aggregator)

        assert analytic.loss == pytest.approx(numeric.loss, rel=1e-12)
        np.testing.assert_allclose(analytic.grads, numeric.grads, rtol=1e-4, atol=1e-6)

    def test_loss_matches_forward(self):
        g = gen_cycle(7)
        x = init_attributes(g, 3, seed=4)
        params = _params(4, depth=5)
        final, trace = forward(x, g, params)
        record = backward(g, x, params, trace=trace)
        assert record.loss == pytest.approx(margin_loss(final, g))
        assert record.grads.shape == (5, 5)

    def test_no_edges_gives_zero_gradient(self):
        g = Graph.empty(4)
        record = backward(g, init_attributes(g, 2, seed=0), _params(0))
        assert record.loss == 0.0
        assert not record.grads.any()

    def test_trace_depth_checked(self):
        g = gen_cycle(4)
        x = init_attributes(g, 2, seed=0)
        _, trace = forward(x, g, GdnParams.default(2))
        with pytest.raises(ValueError, match="trace has 2 layers"):
            backward(g, x, GdnParams.default(3), trace=trace)

    def test_finite_diff_step_positive(self):
        g = gen_path(2)
        with pytest.raises(ValueError, match="step"):
            finite_diff_grad(g, init_attributes(g, 2), GdnParams.default(1), step=0.0)


# ── Adam ────────────────────────────────────────────────────────────────────


class TestAdamStep:
    def test_first_step_moves_by_lr_against_sign(self):
        params = GdnParams.default(2)
        grads = np.array([[0.5, -2.0, 1e-3, 0.0, -7.0], [1.0, 1.0, -1.0, 3.0, 0.25]])
        state = AdamState.zeros(params, AdamConfig(lr=0.01))
        new_state, new_params = adam_step(state, params, GradientRecord(grads=grads, loss=0.0))

        delta = new_params.values - params.values
        np.testing.assert_allclose(delta, -0.01 * np.sign(grads), atol=1e-7)
        assert new_state.t == 1
        assert state.t == 0
        assert params == GdnParams.default(2)

    def test_shape_mismatch(self):
        params = GdnParams.default(3)
        state = AdamState.zeros(GdnParams.default(2))
        with pytest.raises(ValueError, match="shape mismatch"):
            adam_step(state, params, GradientRecord(grads=np.zeros((3, 5)), loss=0.0))

    def test_bad_learning_rate(self):
        with pytest.raises(ValueError, match="learning rate"):
            AdamConfig(lr=0.0).validate()


# ── Training loop ───────────────────────────────────────────────────────────


def _corpus():
    return [(gen_gnp(12, 0.3, seed=s), 3) for s in range(3)]


class TestTrain:
    def test_zero_epochs_returns_start(self):
        start = _params(5, depth=4)
        params, report = train(_corpus(), start, TrainConfig(epochs=0))
        assert params == start
        assert report.epoch_losses == []
        assert report.epochs == 0

    def test_empty_corpus(self):
        with pytest.raises(ValueError, match="must not be empty"):
            train([], config=TrainConfig(epochs=1))

    def test_negative_epochs(self):
        with pytest.raises(ValueError, match="epochs"):
            train(_corpus(), config=TrainConfig(epochs=-1))

    def test_deterministic(self):
        config = TrainConfig(epochs=2, depth=4, seed=11)
        a, report_a = train(_corpus(), config=config)
        b, report_b = train(_corpus(), config=config)
        assert a == b
        assert report_a.epoch_losses == report_b.epoch_losses

    def test_seed_changes_result(self):
        a, _ = train(_corpus(), config=TrainConfig(epochs=1, depth=3, seed=1))
        b, _ = train(_corpus(), config=TrainConfig(epochs=1, depth=3, seed=2))
        assert a != b

    def test_report_and_callback(self):
        events = []
        params, report = train(
            _corpus(),
            config=TrainConfig(epochs=3, depth=3),
            log_callback=lambda step, info: events.append((step, info["epoch"])),
        )
        assert events == [("epoch", 1), ("epoch", 2), ("epoch", 3)]
        assert len(report.epoch_losses) == 3
        assert all(loss >= 0 for loss in report.epoch_losses)
        assert report.corpus["instances"] == 3
        assert report.corpus["colors"] == [3, 3, 3]
        assert GdnParams.from_dict(report.final_params) == params
        assert json.loads(report.to_json())["seed"] == 0

    def test_params_move(self):
        start = calibrate_params(GdnParams.default(3), _corpus(), TrainConfig(depth=3))
        params, report = train(_corpus(), start, TrainConfig(epochs=1))
        assert report.epoch_losses[0] > 0
        assert params != start
        assert params.depth == 3

    def test_fresh_params_start_with_active_loss(self):
        _, report = train(_corpus(), config=TrainConfig(epochs=1, depth=5))
        assert report.epoch_losses[0] > 0

    def test_flat_epoch_warns(self, caplog):
        start = GdnParams(GdnParams.default(3).values * 100.0)
        with caplog.at_level(logging.WARNING, logger="gdncolor.training"):
            params, report = train(_corpus(), start, TrainConfig(epochs=2))
        assert params == start
        assert report.epoch_losses == [0.0, 0.0]
        assert caplog.text.count("every gradient is zero") == 2


class TestCalibrateParams:
    @pytest.mark.parametrize("aggregator", ["sum", "mean"])
    def test_median_edge_distance_lands_on_margin(self, aggregator):
        corpus = _corpus()
        config = TrainConfig(depth=6, seed=3, aggregator=aggregator, loss=LossConfig(margin=0.5))
        params = calibrate_params(GdnParams.default(6), corpus, config)

        rng = np.random.default_rng(config.seed)
        distances = []
        for graph, k in corpus:
            if graph.m == 0:
                continue
            x = init_attributes(graph, k, seed=int(rng.integers(2**63 - 1)))
            h, _ = forward(x, graph, params, aggregator=aggregator)
            diff = h[graph.edges[:, 0]] - h[graph.edges[:, 1]]
            distances.append(np.sqrt((diff * diff).sum(axis=1)))
        assert np.median(np.concatenate(distances)) == pytest.approx(0.5, rel=1e-9)

    def test_layers_scaled_uniformly(self):
        params = calibrate_params(GdnParams.default(4), _corpus(), TrainConfig(depth=4))
        ratios = params.values[:, 0] / GdnParams.default(4).values[:, 0]
        np.testing.assert_allclose(ratios, ratios[0])
        np.testing.assert_allclose(params.values[:, 2], -params.values[:, 0])

    def test_edgeless_corpus_unchanged(self):
        start = GdnParams.default(2)
        assert calibrate_params(start, [(Graph.empty(5), 2)]) == start

    def test_disabled_by_config(self):
        _, report = train(_corpus(), config=TrainConfig(epochs=0, depth=3, calibrate=False))
        assert GdnParams.from_dict(report.final_params) == GdnParams.default(3)
