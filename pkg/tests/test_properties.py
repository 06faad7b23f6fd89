"""Property-based checks on random hypergraphs and tables."""

import numpy as np
from hypothesis import given, settings, strategies as st

from networked.concentration import BoundQuery, networked_bennett, networked_bernstein, networked_hoeffding
from networked.decomposition import DiscreteKDist, anova_decompose
from networked.hypergraph import build, exact_matching, greedy_matching, is_feasible, max_degree
from networked.weighting import eqw_weights, s_value


@st.composite
def partite_hypergraphs(draw, max_edges=12):
    k = draw(st.integers(1, 3))
    size = draw(st.integers(1, 4))
    cells = st.tuples(*[st.integers(0, size - 1) for _ in range(k)])
    edges = draw(st.lists(cells, min_size=1, max_size=max_edges, unique=True))
    return build(k * size, [tuple(l * size + c for l, c in enumerate(e)) for e in edges],
                 [l for l in range(k) for _ in range(size)])


@settings(max_examples=60, deadline=None)
@given(partite_hypergraphs())
def test_ordering_chain(h):
    s = s_value(h)
    assert h.num_edges / max_degree(h) <= s.s + 1e-9
    assert s.s <= h.num_edges + 1e-9
    assert len(greedy_matching(h)) <= len(exact_matching(h)) <= s.s + 1e-9
    assert is_feasible(h, s.weights) and is_feasible(h, eqw_weights(h))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_anova_additivity(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    sizes = tuple(int(a) for a in rng.integers(1, 4, size=k))
    d = DiscreteKDist(tuple(rng.dirichlet(np.ones(a)) for a in sizes))
    f = rng.normal(size=sizes)
    dec = anova_decompose(f, d)
    assert abs(sum(dec.variances.values()) - dec.total_variance) < 1e-10
    assert np.abs(dec.recompose() - (f - dec.mean)).max() < 1e-10


@settings(max_examples=100)
@given(st.floats(0.01, 3), st.floats(0.1, 3), st.floats(0.01, 4), st.floats(0.1, 100))
def test_bounds_in_unit_interval_and_monotone(eps, M, s2, w):
    q = BoundQuery(eps, M=M, sigma2=s2, total_weight=w)
    for fn in (networked_bennett, networked_bernstein, networked_hoeffding):
        a, b = fn(q), fn(q.with_(epsilon=eps * 1.5))
        assert 0.0 <= a.value <= 1.0
        assert b.value <= a.value + 1e-15
        assert fn(q.with_(total_weight=2 * w)).value <= a.value + 1e-15
