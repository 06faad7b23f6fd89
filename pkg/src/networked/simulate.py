"""Monte Carlo simulation of networked samples.

Every vertex gets an independent feature symbol, every edge a value that
depends only on its vertices' features plus independent bounded noise.

Randomness is counter-based: trial ``t`` of a run with master seed ``seed``
draws all of its uniforms from a hash of ``(seed, t, slot)``, where slot ``v``
is vertex ``v`` and slot ``V + i`` is the noise of edge ``i``.  A trial's
outcome therefore does not depend on how trials are chunked or scheduled, and
``draw_sample(h, spec, seed, trial=t)`` reproduces exactly the sample behind
trial ``t`` of any estimator.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _backend, _fallback
from .decomposition import DiscreteKDist, anova_decompose, covariance_matrix, expectation
from .errors import BadParams, InfeasibleWeights, LengthMismatch, SpecMismatch, TooLarge, ZeroWeight
from .hypergraph import Hypergraph, WeightVector, is_feasible
from .weighting import eqw_weights, s_value

CHUNK = 1 << 16
MAX_ENUMERATION = 1 << 20
# deviations this close to epsilon count as hits; keeps exactly attainable
# boundary values (e.g. an average of exactly 0.6) on the ">=" side
HIT_TOL = 1e-12


# -- response model ------------------------------------------------------------

@dataclass(frozen=True)
class ResponseSpec:
    """Feature marginals, an edge response table and optional uniform label noise.

    Partite (``partite=True``): ``dist`` has one marginal per part and
    ``table`` is indexed by the edge's part-0, part-1, ... features.
    Non-partite: ``dist`` has a single marginal shared by every vertex and
    ``table`` is indexed by the edge's features in stored vertex order; every
    edge must then have ``table.ndim`` vertices.
    ``noise`` is the half-width of zero-mean uniform noise added per edge.
    """

    dist: DiscreteKDist
    table: np.ndarray
    noise: float = 0.0
    partite: bool = True

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if not np.all(np.isfinite(t)):
            raise BadParams("response table must be finite")
        if not self.noise >= 0 or not math.isfinite(self.noise):
            raise BadParams("noise half-width must be finite and >= 0")
        if self.partite:
            if t.shape != self.dist.shape:
                raise SpecMismatch(f"table shape {t.shape} does not match alphabets {self.dist.shape}")
        else:
            if self.dist.k != 1:
                raise SpecMismatch("a non-partite spec takes a single vertex marginal")
            if t.ndim == 0 or set(t.shape) != {self.dist.shape[0]}:
                raise SpecMismatch(f"table shape {t.shape} does not match alphabet size {self.dist.shape[0]}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def edge_dist(self) -> DiscreteKDist:
        """Joint law of one edge's features."""
        if self.partite:
            return self.dist
        return DiscreteKDist(self.dist.marginals * self.table.ndim)

    @property
    def mean(self) -> float:
        return float(expectation(self.table, self.edge_dist).ravel()[0])

    @property
    def signal_variance(self) -> float:
        return float(expectation((self.table - self.mean) ** 2, self.edge_dist).ravel()[0])

    @property
    def variance(self) -> float:
        """sigma^2 of one edge value, noise included."""
        return self.signal_variance + self.noise ** 2 / 3.0

    @property
    def M(self) -> float:
        """Bound on |edge value - mean| (over every table cell, noise included)."""
        return float(np.abs(self.table - self.mean).max()) + self.noise

    def mgf(self, scale: float = 1.0) -> float:
        """E exp(scale * X) for one edge value X."""
        signal = float(expectation(np.exp(scale * self.table), self.edge_dist).ravel()[0])
        return signal * _uniform_mgf(scale * self.noise)

    def anova(self):
        if not self.partite:
            raise SpecMismatch("the ANOVA decomposition needs a partite spec")
        return anova_decompose(self.table, self.dist)

    @classmethod
    def rademacher(cls, k: int = 2, kind: str = "first", noise: float = 0.0) -> "ResponseSpec":
        """Uniform +-1 features per part; response is part 0's feature, the mean, or the product."""
        x = np.array([-1.0, 1.0])
        grids = np.meshgrid(*([x] * k), indexing="ij")
        if kind == "first":
            t = grids[0]
        elif kind == "mean":
            t = sum(grids) / k
        elif kind == "product":
            t = np.prod(grids, axis=0)
        else:
            raise BadParams(f"unknown Rademacher response kind {kind!r}")
        return cls(DiscreteKDist.uniform([2] * k), t, noise)

    @classmethod
    def iid_vertices(cls, marginal: Sequence[float], table, noise: float = 0.0) -> "ResponseSpec":
        """Non-partite spec: every vertex feature drawn from ``marginal``."""
        return cls(DiscreteKDist((np.asarray(marginal, dtype=float),)), np.asarray(table, dtype=float),
                   noise, partite=False)


def _uniform_mgf(a: float) -> float:
    """E exp(U) for U uniform on [-a, a]."""
    if a == 0.0:
        return 1.0
    return math.sinh(a) / a


@dataclass(frozen=True)
class SamplingPlan:
    """A spec laid out against a concrete hypergraph, in kernel-ready arrays."""

    cdf: np.ndarray
    cdf_len: np.ndarray
    vgroup: np.ndarray
    cells: np.ndarray
    strides: np.ndarray
    table: np.ndarray
    noise: float

    @property
    def num_vertices(self) -> int:
        return len(self.vgroup)

    @property
    def num_edges(self) -> int:
        return self.cells.shape[0]

    def flat_cells(self, sym: np.ndarray) -> np.ndarray:
        """Flat table index of every edge for symbol rows ``sym`` (trials x vertices)."""
        flat = np.zeros(sym.shape[:-1] + (self.num_edges,), dtype=np.int64)
        for d in range(self.cells.shape[1]):
            flat += sym[..., self.cells[:, d]] * self.strides[d]
        return flat


def plan(h: Hypergraph, spec: ResponseSpec) -> SamplingPlan:
    t = spec.table
    if spec.partite:
        if not h.is_partite:
            raise SpecMismatch("partite spec needs a k-partite hypergraph")
        if h.num_edges and h.num_parts != t.ndim:
            raise SpecMismatch(f"spec has {t.ndim} parts, hypergraph has {h.num_parts}")
        cells = h.cells_by_part() if h.num_edges else np.zeros((0, t.ndim), dtype=np.int64)
        vgroup = np.asarray(h.partition, dtype=np.int64)
        if vgroup.size and vgroup.max() >= spec.dist.k:
            raise SpecMismatch("hypergraph has more parts than the response")
    else:
        bad = [i for i, e in enumerate(h.edges) if len(e) != t.ndim]
        if bad:
            raise SpecMismatch(f"edge {bad[0]} has {len(h.edges[bad[0]])} vertices, table expects {t.ndim}")
        cells = np.array(h.edges, dtype=np.int64).reshape(h.num_edges, t.ndim)
        vgroup = np.zeros(h.num_vertices, dtype=np.int64)
    ms = spec.dist.marginals
    width = max(len(p) for p in ms)
    cdf = np.ones((len(ms), width))
    for g, p in enumerate(ms):
        cdf[g, : len(p)] = np.cumsum(p)
    strides = np.array([int(np.prod(t.shape[d + 1:])) for d in range(t.ndim)], dtype=np.int64)
    return SamplingPlan(
        np.ascontiguousarray(cdf),
        np.array([len(p) for p in ms], dtype=np.int64),
        np.ascontiguousarray(vgroup),
        np.ascontiguousarray(cells),
        strides,
        np.ascontiguousarray(t.ravel()),
        float(spec.noise),
    )


# -- single samples -------------------------------------------------------------

@dataclass(frozen=True)
class NetworkedSample:
    features: np.ndarray  # one symbol per vertex
    values: np.ndarray  # one real per edge
    cells: np.ndarray  # flat table index of each edge's features

    def weighted_sum(self, w) -> float:
        """sum_i w_i y_i, accumulated in edge order (the kernels' summation order)."""
        w = np.asarray(getattr(w, "weights", w), dtype=float)
        acc = 0.0
        for wi, yi in zip(w.tolist(), self.values.tolist()):
            acc = acc + wi * yi
        return acc


def draw_sample(h: Hypergraph, spec: ResponseSpec, seed: int, trial: int = 0) -> NetworkedSample:
    p = plan(h, spec)
    return draw_from_plan(p, seed, trial)


def draw_from_plan(p: SamplingPlan, seed: int, trial: int) -> NetworkedSample:
    bases = _fallback.trial_bases(seed, [trial])
    sym = _fallback.draw_symbols(bases, p.cdf, p.cdf_len, p.vgroup)[0]
    flat = p.flat_cells(sym)
    y = p.table[flat]
    if p.noise > 0.0:
        un = _fallback.slot_uniforms(bases, p.num_vertices + np.arange(p.num_edges))[0]
        y = y + p.noise * (2.0 * un - 1.0)
    return NetworkedSample(sym, y, flat)


# -- weighted sums over many trials --------------------------------------------------

def _weights(h: Hypergraph, w) -> np.ndarray:
    arr = np.asarray(getattr(w, "weights", w), dtype=float)
    if arr.shape != (h.num_edges,):
        raise LengthMismatch(f"{arr.size} weights for {h.num_edges} edges")
    return arr


def _total(w: np.ndarray) -> float:
    s = float(w.sum())
    if not s > 0:
        raise ZeroWeight("weights must have a positive sum")
    return s


def weighted_sums(h: Hypergraph, spec: ResponseSpec, w, trials: int, seed: int, start: int = 0,
                  workers: int = 1, backend: str = "auto") -> np.ndarray:
    """sum_i w_i y_i for trials ``start .. start + trials - 1``.

    The result is bitwise identical for any ``workers`` and either backend.
    """
    if trials < 0:
        raise BadParams("trials must be >= 0")
    p = plan(h, spec)
    return _sums(p, _weights(h, w), trials, seed, start, workers, backend)


def _sums(p: SamplingPlan, w: np.ndarray, trials: int, seed: int, start: int, workers: int,
          backend: str) -> np.ndarray:
    kern = _backend.get(backend)
    out = np.empty(trials)
    w = np.ascontiguousarray(w, dtype=float)
    seed = int(seed) % 2 ** 64

    def run(c0):
        c1 = min(trials, c0 + CHUNK)
        kern.trial_sums(seed, start + c0, c1 - c0, p.cdf, p.cdf_len, p.vgroup, p.cells, p.strides,
                        p.table, p.noise, w, out[c0:c1])

    chunks = range(0, trials, CHUNK)
    if workers > 1 and trials > CHUNK:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(run, chunks))
    else:
        for c0 in chunks:
            run(c0)
    return out


# -- estimators -----------------------------------------------------------------

@dataclass(frozen=True)
class TailEstimate:
    epsilon: float
    trials: int
    hits: int

    @property
    def estimate(self) -> float:
        return self.hits / self.trials

    @property
    def se(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1.0 - p) / self.trials)


def estimate_tails(h: Hypergraph, spec: ResponseSpec, w, epsilons: Sequence[float], trials: int, seed: int,
                   workers: int = 1, backend: str = "auto") -> list[TailEstimate]:
    """Pr((1/|w|) sum_i w_i X_i - mean >= eps) for each eps, all from the same trials."""
    if trials < 1:
        raise BadParams("trials must be >= 1")
    if any(not e > 0 for e in epsilons):
        raise BadParams("epsilon must be positive")
    arr = _weights(h, w)
    total = _total(arr)
    dev = weighted_sums(h, spec, arr, trials, seed, workers=workers, backend=backend) / total - spec.mean
    return [TailEstimate(float(e), trials, int(np.count_nonzero(dev >= e - HIT_TOL))) for e in epsilons]


def estimate_tail(h: Hypergraph, spec: ResponseSpec, w, epsilon: float, trials: int, seed: int,
                  workers: int = 1, backend: str = "auto") -> TailEstimate:
    return estimate_tails(h, spec, w, [epsilon], trials, seed, workers, backend)[0]


def sample_variance(x: np.ndarray, mean: float | None = None) -> tuple[float, float]:
    """(variance, standard error).

    With ``mean`` given the estimator is the mean squared deviation from it;
    otherwise the unbiased sample variance.  The standard error is the
    delta-method sqrt((m4 - var^2) / n).
    """
    n = len(x)
    if n < 2:
        raise BadParams("need at least 2 trials")
    if mean is None:
        c = x - x.mean()
        var = float(c @ c) / (n - 1)
    else:
        c = x - mean
        var = float(c @ c) / n
    m4 = float(np.mean(c ** 4))
    return var, math.sqrt(max(m4 - var ** 2, 0.0) / n)


def estimate_variance(h: Hypergraph, spec: ResponseSpec, w, trials: int, seed: int, workers: int = 1,
                      backend: str = "auto") -> tuple[float, float]:
    """Unbiased sample variance of (1/|w|) sum_i w_i X_i and its standard error."""
    arr = _weights(h, w)
    total = _total(arr)
    x = weighted_sums(h, spec, arr, trials, seed, workers=workers, backend=backend) / total
    return sample_variance(x)


@dataclass(frozen=True)
class MgfCheck:
    """E exp(scale * sum w_i X_i) (Monte Carlo) against prod (E exp(scale X_i))^{w_i} (exact)."""

    lhs: float
    rhs: float
    lhs_se: float
    rhs_se: float = 0.0

    def holds(self, z: float = 3.0) -> bool:
        return self.lhs <= self.rhs + z * math.hypot(self.lhs_se, self.rhs_se)


def check_mgf(h: Hypergraph, spec: ResponseSpec, w, trials: int, seed: int, scale: float = 1.0,
              workers: int = 1, backend: str = "auto") -> MgfCheck:
    """Monte Carlo check of the product bound on the weighted-sum MGF.

    Every edge value has the same law, so the right side is exactly
    (E exp(scale X))^{|w|}; only the left side carries Monte Carlo error.
    """
    arr = _weights(h, w)
    if not is_feasible(h, arr):
        raise InfeasibleWeights("the product bound needs feasible weights")
    if trials < 2:
        raise BadParams("need at least 2 trials")
    e = np.exp(scale * weighted_sums(h, spec, arr, trials, seed, workers=workers, backend=backend))
    lhs = float(e.mean())
    se = float(e.std(ddof=1)) / math.sqrt(trials)
    rhs = spec.mgf(scale) ** float(arr.sum())
    return MgfCheck(lhs, rhs, se)


# -- exact enumeration ------------------------------------------------------------

def enumerate_sums(h: Hypergraph, spec: ResponseSpec, w) -> tuple[np.ndarray, np.ndarray]:
    """Every feature assignment's noiseless weighted sum and its probability.

    Vertices outside every edge are left out.  Limited to 2^20 assignments.
    """
    p = plan(h, spec)
    arr = _weights(h, w)
    used = np.flatnonzero(np.bincount(p.cells.ravel(), minlength=p.num_vertices)) if p.num_edges \
        else np.zeros(0, dtype=np.int64)
    sizes = p.cdf_len[p.vgroup[used]]
    count = int(np.prod(sizes, dtype=float)) if len(used) else 1
    if count > MAX_ENUMERATION:
        raise TooLarge(f"{count} feature assignments (limit {MAX_ENUMERATION})")
    probs_by_group = [np.asarray(m) for m in spec.dist.marginals]
    values = np.empty(count)
    probs = np.empty(count)
    for c0 in range(0, count, CHUNK):
        c1 = min(count, c0 + CHUNK)
        idx = np.arange(c0, c1)
        sub = np.stack(np.unravel_index(idx, tuple(sizes)), axis=1) if len(used) else np.zeros((c1 - c0, 0), int)
        sym = np.zeros((c1 - c0, p.num_vertices), dtype=np.int64)
        sym[:, used] = sub
        pr = np.ones(c1 - c0)
        for j, v in enumerate(used):
            pr *= probs_by_group[p.vgroup[v]][sub[:, j]]
        y = p.table[p.flat_cells(sym)]
        acc = np.zeros(c1 - c0)
        for i in range(p.num_edges):
            acc = acc + arr[i] * y[:, i]
        values[c0:c1] = acc
        probs[c0:c1] = pr
    return values, probs


def exact_tail(h: Hypergraph, spec: ResponseSpec, w, epsilon: float) -> float:
    if spec.noise > 0:
        raise BadParams("exact tails are only available for noiseless specs")
    arr = _weights(h, w)
    total = _total(arr)
    vals, probs = enumerate_sums(h, spec, arr)
    return float(probs[vals / total - spec.mean >= epsilon - HIT_TOL].sum())


def exact_variance(h: Hypergraph, spec: ResponseSpec, w) -> float:
    arr = _weights(h, w)
    total = _total(arr)
    vals, probs = enumerate_sums(h, spec, arr)
    m = float(probs @ vals)
    signal = float(probs @ (vals - m) ** 2)
    return (signal + spec.noise ** 2 / 3.0 * float(arr @ arr)) / total ** 2


def exact_mgf(h: Hypergraph, spec: ResponseSpec, w, scale: float = 1.0) -> MgfCheck:
    """Both sides of the MGF product bound by enumeration (noise handled in closed form)."""
    arr = _weights(h, w)
    vals, probs = enumerate_sums(h, spec, arr)
    noise = math.prod(_uniform_mgf(scale * wi * spec.noise) for wi in arr)
    lhs = float(probs @ np.exp(scale * vals)) * noise
    return MgfCheck(lhs, spec.mgf(scale) ** float(arr.sum()), 0.0)


def exact_covariance(h: Hypergraph, spec: ResponseSpec) -> np.ndarray:
    """Edge-value covariance matrix from the response's exact ANOVA decomposition."""
    return covariance_matrix(h, spec.anova().variances, spec.noise ** 2 / 3.0)


# -- experiments -----------------------------------------------------------------------

@dataclass(frozen=True)
class SValueVarianceReport:
    s: float
    sigma2: float
    bound: float  # sigma^2 / s
    var_svalue: float
    se_svalue: float
    var_eqw: float
    se_eqw: float

    def within_bound(self, z: float = 4.0) -> bool:
        return self.var_svalue <= self.bound + z * self.se_svalue

    def eqw_worse(self) -> bool:
        return self.var_eqw > self.var_svalue

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def svalue_variance_check(h: Hypergraph, spec: ResponseSpec, trials: int, seed: int, workers: int = 1,
                          backend: str = "auto") -> SValueVarianceReport:
    """Variance of the s-value weighted average against sigma^2/s and against equal weighting."""
    sv = s_value(h, backend=backend)
    var_s, se_s = estimate_variance(h, spec, sv.weights, trials, seed, workers, backend)
    var_e, se_e = estimate_variance(h, spec, eqw_weights(h), trials, seed, workers, backend)
    sigma2 = spec.variance
    return SValueVarianceReport(sv.s, sigma2, sigma2 / sv.s, var_s, se_s, var_e, se_e)


def ensemble_variance(make_graph: Callable[[int], Hypergraph], spec: ResponseSpec,
                      weight_fn: Callable[[Hypergraph], WeightVector], graphs: int, trials_per_graph: int,
                      seed: int, workers: int = 1, backend: str = "auto") -> tuple[float, float]:
    """Variance of the weighted average when the hypergraph itself is random.

    Draws ``graphs`` hypergraphs (graph g from ``make_graph(seed_g)``), runs
    ``trials_per_graph`` trials on each, and averages the squared deviations
    from the exact mean.  The standard error treats graphs as clusters: the
    spread of the per-graph mean squares over sqrt(graphs).
    """
    if graphs < 2 or trials_per_graph < 1:
        raise BadParams("need >= 2 graphs and >= 1 trial per graph")
    graph_seeds = np.random.SeedSequence(seed).generate_state(graphs, dtype=np.uint32)
    mu = spec.mean
    per_graph = np.empty(graphs)
    for g in range(graphs):
        h = make_graph(int(graph_seeds[g]))
        w = _weights(h, weight_fn(h))
        total = _total(w)
        x = weighted_sums(h, spec, w, trials_per_graph, seed, start=g * trials_per_graph,
                          workers=workers, backend=backend) / total
        per_graph[g] = float(np.mean((x - mu) ** 2))
    return float(per_graph.mean()), float(per_graph.std(ddof=1)) / math.sqrt(graphs)


def er_eqw_variance_formula(N: int, p: float, sigma2: float = 1.0) -> float:
    """(1/N + (1 - p)/(N^2 p)) sigma^2: equal-weight average of a part-0 response on a bipartite ER graph."""
    return (1.0 / N + (1.0 - p) / (N * N * p)) * sigma2
