import networkx as nx
import numpy as np
import pytest

from networked.errors import NotKPartite, TooLarge
from networked.hypergraph import (
    exact_matching,
    gen_bipartite_ba,
    gen_bipartite_er,
    gen_disjoint,
    gen_star,
    gen_triangle,
    greedy_matching,
    is_feasible,
    max_degree,
)
from networked.weighting import (
    eqw_weights,
    ind_weights,
    minimax_oracle,
    minimax_variance_weights,
    project_simplex,
    s_value,
    worst_case_variance,
)

from conftest import path3, random_partite, small_fixtures


class TestSValue:
    def test_examples(self):
        assert s_value(gen_triangle()).s == pytest.approx(1.5)
        np.testing.assert_allclose(s_value(gen_triangle()).weights.weights, [0.5] * 3)
        assert s_value(gen_star(5)).s == pytest.approx(1.0)
        assert s_value(gen_disjoint(4)).s == pytest.approx(4.0)

    def test_frozen_highs_values(self, frozen):
        fx = small_fixtures()
        fx.update({f"ba50_2_s{s}": gen_bipartite_ba(50, 2, s) for s in range(3)})
        fx.update({f"er50_4_s{s}": gen_bipartite_er(50, 4 / 50, s) for s in range(3)})
        for name, want in frozen["s_value"].items():
            if name in fx:
                assert s_value(fx[name]).s == pytest.approx(want, abs=1e-8), name

    def test_bipartite_equals_max_matching(self):
        # Koenig: the fractional matching LP of a bipartite graph is integral
        for seed in range(5):
            h = gen_bipartite_er(40, 3 / 40, seed)
            g = nx.Graph()
            g.add_nodes_from(range(80))
            g.add_edges_from(h.edges)
            mm = nx.bipartite.hopcroft_karp_matching(g, top_nodes=range(40))
            assert s_value(h).s == pytest.approx(len(mm) / 2, abs=1e-8)

    def test_weights_feasible(self):
        for h in small_fixtures().values():
            r = s_value(h)
            assert r.weights.feasible
            assert is_feasible(h, r.weights)
            assert r.weights.total == pytest.approx(r.s, abs=1e-8)

    def test_empty(self):
        assert s_value(gen_bipartite_er(5, 0.0, 0)).s == 0.0

    def test_backends_agree(self):
        h = gen_bipartite_ba(60, 3, 2)
        assert s_value(h, backend="python").s == pytest.approx(s_value(h).s, abs=1e-9)


class TestSimpleSchemes:
    def test_eqw(self):
        np.testing.assert_allclose(eqw_weights(gen_star(5)).weights, [0.2] * 5)
        for h in small_fixtures().values():
            w = eqw_weights(h)
            assert is_feasible(h, w)
            assert w.total == pytest.approx(h.num_edges / max_degree(h))

    def test_ind(self):
        np.testing.assert_array_equal(ind_weights(gen_disjoint(4)).weights, [1] * 4)
        h = gen_star(4)
        np.testing.assert_array_equal(ind_weights(h).weights, [1, 0, 0, 0])
        for h in small_fixtures().values():
            assert ind_weights(h).total == len(greedy_matching(h))


class TestMinimax:
    def test_path_exact(self):
        r = minimax_variance_weights(path3())
        assert r.worst_variance == pytest.approx(0.5, abs=1e-4)

    def test_star_and_disjoint(self):
        assert minimax_variance_weights(gen_star(4)).worst_variance == pytest.approx(1.0, abs=1e-6)
        assert minimax_variance_weights(gen_disjoint(4)).worst_variance == pytest.approx(0.25, abs=1e-6)

    def test_frozen_cvxpy_values(self, frozen):
        from networked.hypergraph import disjoint_union

        fx = {
            "path3": path3(),
            "star4": gen_star(4),
            "disjoint4": gen_disjoint(4),
            "star2+disjoint2": disjoint_union(gen_star(2), gen_disjoint(2)),
            "ba6_2": gen_bipartite_ba(6, 2, 3),
            "ba12_2": gen_bipartite_ba(12, 2, 5),
        }
        for name, want in frozen["minimax"].items():
            got = minimax_variance_weights(fx[name]).worst_variance
            assert got == pytest.approx(want, abs=1e-4), name

    def test_simplex_output(self):
        r = minimax_variance_weights(gen_bipartite_ba(8, 2, 1))
        assert r.weights.sum() == pytest.approx(1.0)
        assert np.all(r.weights >= 0)
        assert worst_case_variance(gen_bipartite_ba(8, 2, 1), r.weights) == pytest.approx(r.worst_variance)

    def test_unnormalized(self):
        r = minimax_variance_weights(gen_disjoint(3))
        np.testing.assert_allclose(r.unnormalized(), [1, 1, 1], atol=1e-6)

    def test_oracle_agreement(self):
        rng = np.random.default_rng(9)
        hs = [path3(), gen_star(3), gen_disjoint(2)] + [random_partite(rng, 2, 3, n) for n in (2, 3, 4, 4)]
        for h in hs:
            got = minimax_variance_weights(h).worst_variance
            ref = minimax_oracle(h, resolution=1 / 120 if h.num_edges == 4 else 1e-3).worst_variance
            assert got <= ref + 1e-3

    def test_not_partite(self):
        with pytest.raises(NotKPartite):
            minimax_variance_weights(gen_triangle())

    def test_oracle_limit(self):
        with pytest.raises(TooLarge):
            minimax_oracle(gen_star(5))

    def test_project_simplex(self):
        p = project_simplex(np.array([0.5, 2.0, -1.0]))
        np.testing.assert_allclose(p, [0, 1, 0])
        p = project_simplex(np.array([0.3, 0.3, 0.4]))
        np.testing.assert_allclose(p, [0.3, 0.3, 0.4])


def test_ordering_chain_small():
    for name, h in small_fixtures().items():
        s = s_value(h).s
        n = h.num_edges
        assert n / max_degree(h) <= s + 1e-9 <= n + 2e-9, name
        assert s >= len(exact_matching(h)) - 1e-9, name
