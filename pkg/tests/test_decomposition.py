import itertools

import numpy as np
import pytest

from networked.decomposition import (
    DiscreteKDist,
    anova_decompose,
    covariance_matrix,
    expectation,
    submasks,
    weighted_variance,
)
from networked.errors import AlphabetTooLarge, BadParams, NotKPartite, ShapeMismatch, ZeroWeight
from networked.hypergraph import build, gen_disjoint, gen_star, gen_triangle
from networked.weighting import eqw_weights, minimax_variance_weights

from conftest import path3

PM = np.array([-1.0, 1.0])


def random_instance(rng):
    k = int(rng.integers(1, 4))
    sizes = rng.integers(2, 5, size=k)
    margs = tuple(rng.dirichlet(np.ones(a)) for a in sizes)
    return rng.normal(size=tuple(sizes)), DiscreteKDist(margs)


def check_decomposition_identities(f, d, tol=1e-10):
    dec = anova_decompose(f, d)
    k = d.k
    shape = d.shape
    joint = d.joint()
    for mask, comp in dec.components.items():
        full = np.broadcast_to(comp, shape)
        for i in range(k):
            if mask >> i & 1:
                assert np.abs(expectation(full, d, [i])).max() < tol
        assert abs(float((joint * full).sum())) < tol
    for a, b in itertools.combinations(dec.components, 2):
        prod = np.broadcast_to(dec.components[a], shape) * np.broadcast_to(dec.components[b], shape)
        assert abs(float((joint * prod).sum())) < tol
    assert abs(sum(dec.variances.values()) - dec.total_variance) < tol
    assert np.abs(dec.recompose() - (f - dec.mean)).max() < tol
    return dec


class TestDist:
    def test_validation(self):
        with pytest.raises(BadParams):
            DiscreteKDist((np.array([0.5, 0.6]),))
        with pytest.raises(BadParams):
            DiscreteKDist((np.array([1.5, -0.5]),))

    def test_joint(self):
        d = DiscreteKDist.uniform([2, 3])
        assert d.joint().shape == (2, 3)
        assert d.joint().sum() == pytest.approx(1)


class TestAnova:
    def test_first(self):
        dec = anova_decompose(np.add.outer(PM, 0 * PM), DiscreteKDist.uniform([2, 2]))
        assert dec.variance([0]) == pytest.approx(1)
        assert dec.variance([1]) == pytest.approx(0) and dec.variance([0, 1]) == pytest.approx(0)

    def test_xor(self):
        dec = anova_decompose(np.multiply.outer(PM, PM), DiscreteKDist.uniform([2, 2]))
        assert dec.variance([0, 1]) == pytest.approx(1)
        assert dec.variance([0]) == pytest.approx(0)

    def test_additive(self):
        dec = anova_decompose(np.add.outer(PM, PM), DiscreteKDist.uniform([2, 2]))
        assert dec.variance([0]) == pytest.approx(1) and dec.variance([1]) == pytest.approx(1)
        assert dec.variance([0, 1]) == pytest.approx(0)

    def test_centering(self):
        dec = anova_decompose(np.add.outer(PM, PM) + 3.0, DiscreteKDist.uniform([2, 2]))
        assert dec.mean == pytest.approx(3.0)
        assert dec.variances[0] == 0.0

    def test_random_identities(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            check_decomposition_identities(*random_instance(rng))

    def test_errors(self):
        with pytest.raises(ShapeMismatch):
            anova_decompose(np.zeros((2, 3)), DiscreteKDist.uniform([2, 2]))
        big = DiscreteKDist.uniform([4000, 4000])
        with pytest.raises(AlphabetTooLarge):
            anova_decompose(np.zeros((4000, 4000)), big)

    def test_submasks(self):
        assert sorted(submasks(0b101)) == [0, 1, 4, 5]


class TestCovariance:
    def test_disjoint_off_diagonal(self):
        cov = covariance_matrix(gen_disjoint(2), {(0,): 0.3, (1,): 0.5, (0, 1): 0.2})
        np.testing.assert_allclose(cov, np.eye(2))

    def test_shared_part0(self):
        h = build(3, [(0, 1), (0, 2)], [0, 1, 1])
        cov = covariance_matrix(h, {(0,): 1.0})
        np.testing.assert_allclose(cov, np.ones((2, 2)))

    def test_symmetric_diag(self):
        cov = covariance_matrix(path3(), {1: 0.5, 2: 0.25, 3: 0.25})
        np.testing.assert_allclose(cov, cov.T)
        np.testing.assert_allclose(np.diag(cov), 1.0)

    def test_path_against_simulation(self):
        # f = x0 + x1 on the path; Monte Carlo covariance of the edge values
        h = path3()
        cov = covariance_matrix(h, {(0,): 1.0, (1,): 1.0})
        rng = np.random.default_rng(4)
        x = rng.choice(PM, size=(10 ** 6, 4))
        cells = h.cells_by_part()
        y = x[:, cells[:, 0]] + x[:, cells[:, 1]]
        emp = np.cov(y, rowvar=False)
        se = np.sqrt((1 + cov ** 2 / 4) / 10 ** 6) * 2  # loose per-entry scale
        assert np.all(np.abs(emp - cov) < 3 * se + 5e-3)

    def test_not_partite(self):
        with pytest.raises(NotKPartite):
            covariance_matrix(gen_triangle(), {})

    def test_bad_subset(self):
        with pytest.raises(BadParams):
            covariance_matrix(gen_disjoint(2), {(5,): 1.0})


class TestWeightedVariance:
    def test_uniform_independent(self):
        assert weighted_variance(np.ones(4), np.eye(4)) == pytest.approx(0.25)

    def test_single_edge(self):
        assert weighted_variance([0, 1, 0], 2.0 * np.eye(3)) == pytest.approx(2.0)

    def test_star_eqw(self):
        h = gen_star(5)
        cov = covariance_matrix(h, {(0,): 1.0})
        assert weighted_variance(eqw_weights(h), cov) == pytest.approx(1.0)

    def test_errors(self):
        with pytest.raises(ZeroWeight):
            weighted_variance(np.zeros(2), np.eye(2))
        with pytest.raises(ShapeMismatch):
            weighted_variance(np.ones(2), np.eye(3))

    def test_minimax_bounds_all_allocations(self):
        # for any variance allocation with sigma^2 = 1, w'Sigma w' <= t (the worst case is a single part)
        h = path3()
        r = minimax_variance_weights(h)
        rng = np.random.default_rng(2)
        for _ in range(50):
            v = rng.dirichlet(np.ones(3))  # nonempty subsets only; mu_empty is zero
            cov = covariance_matrix(h, dict(zip((1, 2, 3), v)))
            assert float(r.weights @ cov @ r.weights) <= r.worst_variance + 1e-6
