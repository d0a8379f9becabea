import itertools

import numpy as np
import pytest

from gdncolor import (
    ColorAssignment,
    CompletionStatus,
    Graph,
    InvariantError,
    PartialAssignment,
    count_conflicts,
    exact_complete,
    greedy_dynamic,
    postprocess_local_search,
    preprocess_peel,
    reinsert,
    threshold_partial,
)
from gdncolor.generators import gen_complete, gen_cycle, gen_gnp, gen_path, gen_petersen, gen_star
from gdncolor.refine import THRESHOLDS, threshold_index


def _k4_with_pendant() -> Graph:
    return Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4)])


def _brute_force_colorable(g: Graph, k: int) -> bool:
    edges = g.edges.tolist()
    for colors in itertools.product(range(k), repeat=g.n):
        if all(colors[u] != colors[v] for u, v in edges):
            return True
    return False


# ── Peeling ─────────────────────────────────────────────────────────────────


class TestPreprocessPeel:
    def test_pendant_removed_core_kept(self):
        peel = preprocess_peel(_k4_with_pendant(), 3)
        assert peel.peeled == 1
        assert peel.stack == [(4, (0,))]
        assert peel.kept_ids.tolist() == [0, 1, 2, 3]
        assert peel.reduced == gen_complete(4)

    def test_star_peels_completely(self):
        peel = preprocess_peel(gen_star(4), 2)
        assert peel.reduced.n == 0
        assert [v for v, _ in peel.stack] == [1, 2, 3, 0, 4]
        assert peel.stack[3] == (0, (4,))

    def test_nothing_to_peel(self):
        peel = preprocess_peel(gen_complete(4), 3)
        assert peel.peeled == 0
        assert peel.reduced == gen_complete(4)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError, match="k must be"):
            preprocess_peel(gen_path(3), 0)


class TestReinsert:
    def test_smallest_free_colour(self):
        g = _k4_with_pendant()
        peel = preprocess_peel(g, 3)
        colors = reinsert(peel, ColorAssignment(np.array([0, 1, 2, 3]), 4))
        assert colors.to_list() == [0, 1, 2, 3, 1]
        assert colors.k == 4

    def test_star_reinsertion(self):
        peel = preprocess_peel(gen_star(4), 2)
        colors = reinsert(peel, ColorAssignment(np.zeros(0, dtype=np.int64), 2))
        assert colors.to_list() == [1, 0, 0, 0, 0]

    def test_pin_used_when_free(self):
        peel = preprocess_peel(_k4_with_pendant(), 3)
        reduced = ColorAssignment(np.array([0, 1, 2, 3]), 4)
        assert reinsert(peel, reduced, pins={4: 2}).colors[4] == 2
        assert reinsert(peel, reduced, pins={4: 0}).colors[4] == 1

    def test_length_mismatch(self):
        peel = preprocess_peel(_k4_with_pendant(), 3)
        with pytest.raises(ValueError, match="reduced assignment"):
            reinsert(peel, ColorAssignment(np.zeros(3, dtype=np.int64), 3))

    @pytest.mark.parametrize("seed", range(8))
    def test_proper_core_stays_proper(self, seed):
        g = gen_gnp(30, 0.12, seed=seed)
        peel = preprocess_peel(g, 3)
        core = greedy_dynamic(peel.reduced) if peel.reduced.n else ColorAssignment(np.zeros(0, dtype=np.int64), 3)
        full = reinsert(peel, core)
        assert full.n == g.n
        assert count_conflicts(g, full).conflicts == 0

    def test_invariant_error_type(self):
        assert issubclass(InvariantError, RuntimeError)


# ── Local search ────────────────────────────────────────────────────────────


class TestPostprocess:
    def test_triangle_from_monochrome(self):
        out = postprocess_local_search(gen_complete(3), ColorAssignment(np.zeros(3, dtype=np.int64), 3))
        assert out.to_list() == [1, 2, 0]

    def test_proper_input_unchanged(self):
        a = ColorAssignment(np.array([0, 1, 0, 1, 0, 1]), 2)
        assert postprocess_local_search(gen_cycle(6), a) == a

    @pytest.mark.parametrize("seed", range(10))
    def test_never_worse(self, seed):
        rng = np.random.default_rng(seed)
        g = gen_gnp(25, 0.2, seed=seed)
        a = ColorAssignment(rng.integers(0, 3, g.n), 3)
        out = postprocess_local_search(g, a)
        assert out.k == 3
        assert count_conflicts(g, out).conflicts <= count_conflicts(g, a).conflicts

    def test_path_matches_exhaustive_optimum(self):
        g = gen_path(3)
        out = postprocess_local_search(g, ColorAssignment(np.array([0, 0, 1]), 2))
        best = min(
            count_conflicts(g, ColorAssignment(np.array(colors), 2)).conflicts
            for colors in itertools.product(range(2), repeat=3)
        )
        assert best == 0
        assert count_conflicts(g, out).conflicts == best
        assert out.to_list() == [1, 0, 1]

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="entries"):
            postprocess_local_search(gen_path(3), ColorAssignment(np.zeros(2, dtype=np.int64), 2))


# ── Partial assignments ─────────────────────────────────────────────────────


class TestThresholdPartial:
    @pytest.mark.parametrize("n,k,index", [(10, 3, 0), (1000, 3, 2), (100000, 10, 5), (0, 3, 0)])
    def test_threshold_index(self, n, k, index):
        assert threshold_index(n, k) == index

    def test_pins_and_forbids(self):
        probs = np.array(
            [
                [1.0 - 2e-9, 1e-9, 1e-9],
                [0.5, 0.5, 0.0],
                [1 / 3, 1 / 3, 1 / 3],
            ]
        )
        pa = threshold_partial(probs)
        assert THRESHOLDS[threshold_index(3, 3)] == 0.9999
        assert pa.pinned == {0: 0}
        assert pa.forbidden == {0: frozenset({1, 2}), 1: frozenset({2})}

    def test_row_never_fully_forbidden(self):
        pa = threshold_partial(np.zeros((2, 3)))
        assert pa.forbidden == {}
        assert pa.pinned == {}

    def test_shape_checked(self):
        with pytest.raises(ValueError, match="expected"):
            threshold_partial(np.full((2, 3), 1 / 3), n=3)

    def test_reduction_ratio(self):
        pa = PartialAssignment(pinned={0: 1}, forbidden={1: frozenset({0, 2})})
        assert pa.reduction_ratio(4, 3) == pytest.approx(5 / 12)
        assert PartialAssignment().reduction_ratio(4, 3) == 0.0

    def test_validate(self):
        with pytest.raises(ValueError, match="also forbidden"):
            PartialAssignment(pinned={0: 1}, forbidden={0: frozenset({1})}).validate(3, 3)
        with pytest.raises(ValueError, match="every colour"):
            PartialAssignment(forbidden={0: frozenset({0, 1})}).validate(3, 2)
        with pytest.raises(ValueError, match="outside"):
            PartialAssignment(pinned={5: 0}).validate(3, 2)

    def test_json(self):
        pa = PartialAssignment(pinned={2: 1}, forbidden={0: frozenset({0, 2})})
        assert PartialAssignment.from_json(pa.to_json()) == pa


# ── Exact completion ────────────────────────────────────────────────────────


class TestExactComplete:
    def test_triangle(self):
        assert exact_complete(gen_complete(3), 2).status is CompletionStatus.UNSAT
        result = exact_complete(gen_complete(3), 3)
        assert result.solved
        assert count_conflicts(gen_complete(3), result.assignment).conflicts == 0

    def test_budget(self):
        result = exact_complete(gen_cycle(5), 3, budget=1)
        assert result.status is CompletionStatus.BUDGET_EXCEEDED
        assert result.assignment is None
        assert result.expansions == 1

    def test_empty_graph(self):
        result = exact_complete(Graph.empty(0), 2)
        assert result.solved and result.assignment.n == 0

    def test_pins_honoured(self):
        result = exact_complete(gen_cycle(6), 2, PartialAssignment(pinned={0: 1}))
        assert result.solved
        assert result.assignment.colors[0] == 1
        assert count_conflicts(gen_cycle(6), result.assignment).conflicts == 0

    def test_forbidden_honoured(self):
        g = gen_petersen()
        result = exact_complete(g, 3, PartialAssignment(forbidden={0: frozenset({0, 1})}))
        assert result.solved
        assert result.assignment.colors[0] == 2
        assert count_conflicts(g, result.assignment).conflicts == 0

    def test_conflicting_pins_unsat(self):
        pa = PartialAssignment(pinned={0: 0, 1: 0})
        assert exact_complete(gen_path(2), 2, pa).status is CompletionStatus.UNSAT

    def test_odd_cycle_with_pins(self):
        pa = PartialAssignment(pinned={0: 0, 2: 0})
        result = exact_complete(gen_cycle(5), 3, pa)
        assert result.solved
        assert result.assignment.colors[0] == result.assignment.colors[2] == 0

    @pytest.mark.parametrize("seed", range(20))
    def test_agrees_with_brute_force(self, seed):
        g = gen_gnp(7, 0.5, seed=seed)
        for k in (2, 3):
            result = exact_complete(g, k)
            assert result.solved == _brute_force_colorable(g, k)
            if result.solved:
                assert count_conflicts(g, result.assignment).conflicts == 0

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            exact_complete(gen_path(2), 0)

    def test_clique_larger_than_palette_is_unsat_without_search(self):
        result = exact_complete(gen_complete(4), 3)
        assert result.status is CompletionStatus.UNSAT
        assert result.expansions == 0

    def test_clique_covering_graph_needs_no_expansions(self):
        result = exact_complete(_k4_with_pendant(), 4)
        assert result.solved
        assert result.expansions == 1
        assert result.assignment.colors[[0, 1, 2, 3]].tolist() == [0, 1, 2, 3]

    def test_hint_colour_tried_first(self):
        g = gen_cycle(6)
        hint = ColorAssignment(np.array([2, 0, 2, 0, 2, 0]), 3)
        result = exact_complete(g, 3, PartialAssignment(forbidden={1: frozenset({1})}), hint=hint)
        assert result.solved
        assert result.assignment == hint
        assert result.expansions == g.n

    def test_hint_size_checked(self):
        with pytest.raises(ValueError, match="hint"):
            exact_complete(gen_path(3), 2, hint=ColorAssignment(np.zeros(2, dtype=np.int64), 2))
