import networkx as nx
import pytest

from gdncolor import (
    GenerationError,
    Graph,
    gen_complete,
    gen_cycle,
    gen_gnp,
    gen_mycielski,
    gen_path,
    gen_petersen,
    gen_queen,
    gen_random_regular,
    gen_star,
)


def _to_nx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    out.add_edges_from(g.edges.tolist())
    return out


# ── Random regular ──────────────────────────────────────────────────────────


class TestRandomRegular:
    @pytest.mark.parametrize("n,d", [(10, 3), (20, 4), (128, 16)])
    def test_degrees_exact(self, n, d):
        g = gen_random_regular(n, d, seed=0)
        assert g.n == n
        assert set(g.degrees.tolist()) == {d}
        assert g.m == n * d // 2
        assert nx.is_regular(_to_nx(g))

    def test_deterministic(self):
        assert gen_random_regular(30, 4, seed=7) == gen_random_regular(30, 4, seed=7)

    def test_seed_matters(self):
        assert gen_random_regular(30, 4, seed=1) != gen_random_regular(30, 4, seed=2)

    def test_odd_product(self):
        with pytest.raises(ValueError, match="even"):
            gen_random_regular(5, 3, seed=0)

    def test_degree_too_large(self):
        with pytest.raises(ValueError, match="d < n"):
            gen_random_regular(4, 4, seed=0)

    def test_zero_degree(self):
        assert gen_random_regular(6, 0, seed=0).m == 0

    def test_complete_case(self):
        g = gen_random_regular(5, 4, seed=3)
        assert g == gen_complete(5)

    def test_generation_error_carries_seed(self):
        err = GenerationError("boom", seed=4, attempts=200)
        assert err.seed == 4 and err.attempts == 200
        assert "seed=4" in str(err)


# ── G(n, p) ─────────────────────────────────────────────────────────────────


class TestGnp:
    def test_extremes(self):
        assert gen_gnp(10, 0.0, seed=0).m == 0
        assert gen_gnp(10, 1.0, seed=0).m == 45

    def test_deterministic(self):
        assert gen_gnp(40, 0.1, seed=3) == gen_gnp(40, 0.1, seed=3)

    @pytest.mark.parametrize("p", [-0.1, 1.5])
    def test_probability_range(self, p):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            gen_gnp(5, p, seed=0)

    def test_density_close_to_p(self):
        g = gen_gnp(200, 0.1, seed=11)
        density = g.m / (200 * 199 / 2)
        assert abs(density - 0.1) < 0.01


# ── Structured families ─────────────────────────────────────────────────────


class TestStructured:
    @pytest.mark.parametrize(
        "rows,cols,edges",
        [(5, 5, 160), (8, 12, 1368), (6, 6, 290)],
    )
    def test_queen_edge_counts(self, rows, cols, edges):
        g = gen_queen(rows, cols)
        assert (g.n, g.m) == (rows * cols, edges)

    def test_queen_rejects_empty_board(self):
        with pytest.raises(ValueError, match="1x1"):
            gen_queen(0, 3)

    def test_mycielski_sizes(self):
        assert (gen_mycielski(3).n, gen_mycielski(3).m) == (11, 20)
        assert (gen_mycielski(5).n, gen_mycielski(5).m) == (47, 236)

    def test_mycielski_two_is_c5(self):
        assert nx.is_isomorphic(_to_nx(gen_mycielski(2)), nx.cycle_graph(5))

    def test_mycielski_triangle_free(self):
        assert sum(nx.triangles(_to_nx(gen_mycielski(4))).values()) == 0

    def test_petersen_matches_networkx(self):
        assert nx.is_isomorphic(_to_nx(gen_petersen()), nx.petersen_graph())

    def test_small_families(self):
        assert gen_cycle(6).m == 6
        assert gen_path(4).m == 3
        assert gen_complete(4).m == 6
        star = gen_star(4)
        assert star.degrees.tolist() == [4, 1, 1, 1, 1]

    def test_cycle_too_short(self):
        with pytest.raises(ValueError, match="at least 3"):
            gen_cycle(2)

    def test_bundled_instances_match_generators(self):
        from gdncolor.instances import load_instance

        assert load_instance("queen5_5") == gen_queen(5, 5)
        assert load_instance("queen8_12") == gen_queen(8, 12)
        assert load_instance("myciel5") == gen_mycielski(5)
