from pathlib import Path

import numpy as np
import pytest

from gdncolor import (
    ColorPermutation,
    GdnParams,
    Graph,
    PinSet,
    classify_argmax,
    forward,
    forward_layer,
    init_attributes,
    integrated_forward,
    normalize_rows,
    permute_colors,
    softmax_rows,
)
from gdncolor.generators import gen_complete, gen_cycle, gen_gnp, gen_path, gen_star
from gdncolor.model import aggregation_operator, pinned_row, row_sums


def _random_params(rng: np.random.Generator, depth: int, scale: float = 0.5) -> GdnParams:
    return GdnParams(rng.normal(scale=scale, size=(depth, 5)))


def _dense_layer(h: np.ndarray, adjacency: np.ndarray, p) -> np.ndarray:
    lc, gc, la, ga, b = p
    agg = adjacency @ h
    return lc * h + gc * h.sum(axis=1, keepdims=True) + la * agg + ga * agg.sum(axis=1, keepdims=True) + b


# ── Params ──────────────────────────────────────────────────────────────────


class TestGdnParams:
    def test_default_layers(self):
        params = GdnParams.default(3)
        assert params.depth == 3
        assert params.layers[0] == (1.0, 0.0, -1.0, 0.0, 0.0)
        assert params.layers[2].lambda_a == -1.0

    def test_shape_checked(self):
        with pytest.raises(ValueError, match=r"shape \(L, 5\)"):
            GdnParams(np.zeros((2, 4)))
        with pytest.raises(ValueError, match="at least one layer"):
            GdnParams(np.zeros((0, 5)))

    def test_non_finite_rejected(self):
        values = np.zeros((1, 5))
        values[0, 2] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            GdnParams(values)

    def test_depth_must_be_positive(self):
        with pytest.raises(ValueError, match="depth"):
            GdnParams.default(0)

    def test_json_exact(self):
        params = _random_params(np.random.default_rng(1), 4)
        restored = GdnParams.from_json(params.to_json())
        assert np.array_equal(restored.values, params.values)
        assert restored == params

    def test_declared_depth_checked(self):
        data = GdnParams.default(2).to_dict()
        data["depth"] = 3
        with pytest.raises(ValueError, match="declared depth"):
            GdnParams.from_dict(data)

    def test_save_load(self, tmp_path: Path):
        params = _random_params(np.random.default_rng(2), 2)
        path = params.save(tmp_path / "params.json")
        assert GdnParams.load(path) == params

    def test_load_from_training_report(self, tmp_path: Path):
        params = GdnParams.default(2)
        path = tmp_path / "report.json"
        path.write_text('{"epochs": 0, "final_params": %s}' % params.to_json())
        assert GdnParams.load(path) == params

    def test_fingerprint(self):
        a = GdnParams.default(20)
        fp = a.fingerprint()
        assert len(fp) == 12
        int(fp, 16)
        assert fp == GdnParams.default(20).fingerprint()
        assert fp != GdnParams.default(19).fingerprint()

    def test_values_read_only(self):
        params = GdnParams.default(1)
        with pytest.raises(ValueError):
            params.values[0, 0] = 3.0


# ── Permutations and pins ───────────────────────────────────────────────────


class TestColorPermutation:
    def test_invalid(self):
        with pytest.raises(ValueError, match="not a permutation"):
            ColorPermutation((0, 0, 1))

    def test_inverse(self):
        perm = ColorPermutation((2, 0, 1))
        inv = perm.inverse()
        assert [inv(perm(c)) for c in range(3)] == [0, 1, 2]

    def test_matrix_matches_permute_colors(self):
        rng = np.random.default_rng(0)
        h = rng.normal(size=(4, 3))
        perm = ColorPermutation((2, 0, 1))
        assert np.array_equal(h @ perm.matrix(), permute_colors(h, perm))
        assert np.array_equal(permute_colors(h, perm)[:, 2], h[:, 0])


class TestPinSet:
    def test_parse(self):
        pins = PinSet.parse(["3:1", "0:2"])
        assert dict(pins.pins) == {3: 1, 0: 2}
        assert len(pins) == 2 and bool(pins)

    def test_parse_rejects_bad_spec(self):
        with pytest.raises(ValueError, match="NODE:COLOR"):
            PinSet.parse(["3-1"])

    def test_validate(self):
        with pytest.raises(ValueError, match="outside palette"):
            PinSet({0: 3}).validate(2, 3)
        with pytest.raises(ValueError, match="pinned node"):
            PinSet({5: 0}).validate(2, 3)


# ── Attributes ──────────────────────────────────────────────────────────────


class TestInitAttributes:
    def test_rows_centred_and_bounded(self):
        x = init_attributes(gen_path(10), 4, seed=3)
        assert x.shape == (10, 4)
        np.testing.assert_allclose(x.sum(axis=1), 0.0, atol=1e-12)
        assert (x >= -0.25 - 1e-12).all() and (x <= 0.75 + 1e-12).all()

    def test_deterministic(self):
        g = gen_path(6)
        assert np.array_equal(init_attributes(g, 3, seed=1), init_attributes(g, 3, seed=1))
        assert not np.array_equal(init_attributes(g, 3, seed=1), init_attributes(g, 3, seed=2))

    def test_pinned_rows(self):
        g = gen_path(5)
        pins = PinSet({1: 2})
        x = init_attributes(g, 3, pins, seed=0)
        assert np.array_equal(x[1], pinned_row(3, 2))
        free = init_attributes(g, 3, seed=0)
        mask = np.arange(5) != 1
        assert np.array_equal(x[mask], free[mask])

    def test_uniform_mode(self):
        x = init_attributes(gen_path(4), 3, mode="uniform")
        np.testing.assert_allclose(x, 0.0, atol=1e-15)

    def test_bad_mode(self):
        with pytest.raises(ValueError, match="attribute mode"):
            init_attributes(gen_path(4), 3, mode="onehot")

    def test_palette_too_small(self):
        with pytest.raises(ValueError, match=">= 2"):
            init_attributes(gen_path(4), 1)


# ── Forward ─────────────────────────────────────────────────────────────────


class TestForward:
    def test_single_layer_on_edge(self):
        g = gen_path(2)
        h = np.array([[0.25, -0.25], [-0.1, 0.1]])
        out = forward_layer(h, g, (1.0, 0.0, -1.0, 0.0, 0.0))
        np.testing.assert_allclose(out, [[0.35, -0.35], [-0.35, 0.35]])

    def test_matches_dense_formula(self):
        rng = np.random.default_rng(4)
        g = gen_gnp(15, 0.3, seed=4)
        x = init_attributes(g, 4, seed=4)
        params = _random_params(rng, 3)
        dense = g.adjacency.toarray()
        expected = x
        for layer in params.values:
            expected = _dense_layer(expected, dense, layer)
        out, trace = forward(x, g, params)
        assert len(trace) == 3
        assert trace[-1] is out
        np.testing.assert_allclose(out, expected, rtol=1e-10, atol=1e-12)

    def test_input_untouched(self):
        g = gen_cycle(5)
        x = init_attributes(g, 3, seed=0)
        before = x.copy()
        forward(x, g, GdnParams.default(4))
        assert np.array_equal(x, before)

    def test_shape_checked(self):
        with pytest.raises(ValueError, match="expected"):
            forward(np.zeros((3, 2)), gen_path(4), GdnParams.default(1))

    def test_non_finite_raises(self):
        g = gen_complete(4)
        params = GdnParams(np.tile([1e200, 0.0, 1e200, 0.0, 0.0], (4, 1)))
        with np.errstate(all="ignore"):
            with pytest.raises(FloatingPointError, match="non-finite"):
                forward(init_attributes(g, 3, seed=0), g, params)

    def test_clamped_pins_reset_every_layer(self):
        g = gen_cycle(6)
        pins = PinSet({0: 1})
        x = init_attributes(g, 3, pins, seed=2)
        _, trace = forward(x, g, GdnParams.default(5), pins=pins, clamp=True)
        for h in trace:
            assert np.array_equal(h[0], pinned_row(3, 1))

    def test_mean_aggregator(self):
        g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3)])
        h = np.arange(10, dtype=float).reshape(5, 2)
        agg = np.asarray(aggregation_operator(g, "mean") @ h)
        np.testing.assert_allclose(agg[0], h[1:4].mean(axis=0))
        np.testing.assert_allclose(agg[4], 0.0)

    @pytest.mark.parametrize("aggregator", ["sum", "mean"])
    def test_linear_without_bias(self, aggregator):
        g = gen_gnp(20, 0.25, seed=6)
        rng = np.random.default_rng(6)
        values = rng.normal(scale=0.4, size=(4, 5))
        values[:, 4] = 0.0
        params = GdnParams(values)
        x, y = init_attributes(g, 3, seed=1), init_attributes(g, 3, seed=2)
        a, b = 1.7, -0.6
        combined, _ = forward(a * x + b * y, g, params, aggregator=aggregator)
        fx, _ = forward(x, g, params, aggregator=aggregator)
        fy, _ = forward(y, g, params, aggregator=aggregator)
        np.testing.assert_allclose(combined, a * fx + b * fy, rtol=1e-10, atol=1e-12)

    def test_unknown_aggregator(self):
        with pytest.raises(ValueError, match="aggregator"):
            aggregation_operator(gen_path(3), "max")


class TestColorEquivariance:
    @pytest.mark.parametrize("aggregator", ["sum", "mean"])
    def test_forward_commutes_with_permutation(self, aggregator):
        rng = np.random.default_rng(10)
        for trial in range(20):
            g = gen_gnp(int(rng.integers(2, 30)), 0.2, seed=trial)
            k = int(rng.integers(2, 8))
            params = _random_params(rng, int(rng.integers(1, 8)), scale=0.3)
            x = init_attributes(g, k, seed=trial)
            perm = ColorPermutation.random(k, rng)

            left, _ = forward(permute_colors(x, perm), g, params, aggregator=aggregator)
            right = permute_colors(forward(x, g, params, aggregator=aggregator)[0], perm)
            np.testing.assert_allclose(left, right, rtol=1e-12, atol=1e-12)

    def test_argmax_permutes_when_unique(self):
        rng = np.random.default_rng(3)
        g = gen_gnp(20, 0.25, seed=3)
        x = init_attributes(g, 5, seed=3)
        perm = ColorPermutation.random(5, rng)
        params = GdnParams.default(6)
        base = classify_argmax(forward(x, g, params)[0])
        moved = classify_argmax(forward(permute_colors(x, perm), g, params)[0])
        assert moved.to_list() == [perm(c) for c in base.to_list()]

    def test_uniform_attributes_with_permuted_pin(self):
        g = gen_gnp(12, 0.3, seed=8)
        perm = ColorPermutation((1, 2, 0))
        x = init_attributes(g, 3, PinSet({0: 0}), mode="uniform")
        y = init_attributes(g, 3, PinSet({0: 0}).permuted(perm), mode="uniform")
        assert np.array_equal(y, permute_colors(x, perm))
        params = GdnParams.default(5)
        np.testing.assert_allclose(
            forward(y, g, params)[0], permute_colors(forward(x, g, params)[0], perm), rtol=1e-12, atol=1e-12
        )

    def test_row_sums_order_independent(self):
        h = np.array([[0.1, 0.2, 0.3, 1e16]])
        assert row_sums(h)[0] == row_sums(h[:, ::-1])[0]


# ── Locality failure modes ──────────────────────────────────────────────────


class TestIndistinguishableNodes:
    @pytest.mark.parametrize("graph", [gen_cycle(6), gen_complete(5)])
    def test_identical_rows_stay_identical(self, graph):
        rng = np.random.default_rng(0)
        row = init_attributes(Graph.empty(1), 4, seed=5)[0]
        x = np.tile(row, (graph.n, 1))
        _, trace = forward(x, graph, _random_params(rng, 10, scale=0.3))
        for h in trace:
            assert (h == h[0]).all()
        colors = classify_argmax(trace[-1])
        assert len(set(colors.to_list())) == 1

    def test_integrated_variant_merges_twins(self):
        # 0 and 1 are adjacent and share the closed neighbourhood {0, 1, 2, 3}.
        g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (3, 4)])
        rng = np.random.default_rng(1)
        for seed in range(10):
            x = init_attributes(g, 3, seed=seed)
            assert not np.array_equal(x[0], x[1])
            _, trace = integrated_forward(x, g, _random_params(rng, 6, scale=0.3))
            for h in trace:
                assert np.array_equal(h[0], h[1])


# ── Decoding ────────────────────────────────────────────────────────────────


class TestDecoding:
    def test_argmax_ties_lowest(self):
        h = np.array([[0.5, 0.5, 0.1], [0.0, 0.2, 0.2]])
        assert classify_argmax(h).to_list() == [0, 1]
        assert classify_argmax(h).k == 3

    def test_softmax_rows(self):
        probs = softmax_rows(np.array([[1000.0, 0.0], [0.0, 0.0]]))
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)
        np.testing.assert_allclose(probs[1], [0.5, 0.5])
        assert probs[0, 0] == pytest.approx(1.0)

    def test_star_default_params_two_colours(self):
        g = gen_star(4)
        x = init_attributes(g, 2, seed=0)
        colors = classify_argmax(forward(x, g, GdnParams.default(10))[0])
        leaves = set(colors.to_list()[1:])
        assert leaves == {1 - colors.colors[0]}


# ── Row normalisation ───────────────────────────────────────────────────────


class TestNormalizeRows:
    def test_unit_rows_and_zero_rows(self):
        h = np.array([[3.0, -4.0, 0.0], [0.0, 0.0, 0.0], [1e-3, 0.0, 0.0]])
        out = normalize_rows(h)
        np.testing.assert_allclose(out[0], [0.6, -0.8, 0.0])
        assert not out[1].any()
        np.testing.assert_allclose(out[2], [1.0, 0.0, 0.0])

    def test_scale_free_softmax(self):
        h = init_attributes(gen_cycle(5), 3, seed=0)
        np.testing.assert_allclose(softmax_rows(normalize_rows(h)), softmax_rows(normalize_rows(1e6 * h)))
