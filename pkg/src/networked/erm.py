"""Weighted empirical risk minimization over finite hypothesis classes (square loss)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .decomposition import MAX_CELLS, DiscreteKDist, expectation
from .errors import AlphabetTooLarge, BadParams, EmptyClass, LengthMismatch, ShapeMismatch, ZeroNormalizer
from .hypergraph import Hypergraph, WeightVector, disjoint_union, gen_disjoint, gen_star, is_feasible
from .simulate import NetworkedSample, ResponseSpec, draw_from_plan, plan
from .weighting import eqw_weights, ind_weights, s_value

METHODS = ("eqw", "ind", "svalue")


@dataclass(frozen=True)
class HypothesisClass:
    """Finite list of predictors, each a table over the response's feature grid."""

    tables: tuple[np.ndarray, ...]
    M: float

    def __post_init__(self):
        if len(self.tables) == 0:
            raise EmptyClass("hypothesis class is empty")
        ts = tuple(np.asarray(t, dtype=float) for t in self.tables)
        if len({t.shape for t in ts}) != 1:
            raise ShapeMismatch("all predictors must share one table shape")
        if not self.M > 0:
            raise BadParams("M must be positive")
        for t in ts:
            t.setflags(write=False)
        object.__setattr__(self, "tables", ts)

    def __len__(self):
        return len(self.tables)

    @property
    def stacked(self) -> np.ndarray:
        """(|class|, cells) matrix of flattened predictions."""
        return np.stack([t.ravel() for t in self.tables])

    @classmethod
    def for_spec(cls, tables: Sequence, spec: ResponseSpec, M: float | None = None) -> "HypothesisClass":
        """Class with declared bound M; checked (or computed when omitted) against the response's labels."""
        need = max(label_deviation(t, spec) for t in tables) if len(tables) else 0.0
        if M is None:
            M = need
        elif need > M * (1 + 1e-12):
            raise BadParams(f"class is not {M}-bounded: sup |f(x) - y| = {need}")
        return cls(tuple(tables), M)


def label_deviation(f, spec: ResponseSpec) -> float:
    """sup |f(x) - y| over feature cells with positive probability and the noise range."""
    f = np.asarray(f, dtype=float)
    if f.shape != spec.table.shape:
        raise ShapeMismatch(f"predictor shape {f.shape} does not match response shape {spec.table.shape}")
    support = spec.edge_dist.joint() > 0
    return float(np.abs(f - spec.table)[support].max()) + spec.noise


@dataclass(frozen=True)
class WeightedDataset:
    """Examples as flat feature-cell indices with labels and weights; s = sum of weights."""

    cells: np.ndarray
    labels: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        n = len(self.cells)
        if len(self.labels) != n or len(self.weights) != n:
            raise LengthMismatch("cells, labels and weights must have equal length")
        if np.any(np.asarray(self.weights) < 0):
            raise BadParams("weights must be nonnegative")

    @property
    def s(self) -> float:
        return float(np.sum(self.weights))

    @classmethod
    def from_sample(cls, sample: NetworkedSample, w) -> "WeightedDataset":
        return cls(sample.cells, sample.values, np.asarray(getattr(w, "weights", w), dtype=float))


def weighted_empirical_risk(f, Z: WeightedDataset) -> float:
    """(1/s) sum_i w_i (f(x_i) - y_i)^2."""
    s = Z.s
    if not s > 0:
        raise ZeroNormalizer("weights sum to zero")
    pred = np.asarray(f, dtype=float).ravel()[Z.cells]
    return float(Z.weights @ (pred - Z.labels) ** 2) / s


def empirical_risks(cls: HypothesisClass, Z: WeightedDataset) -> np.ndarray:
    s = Z.s
    if not s > 0:
        raise ZeroNormalizer("weights sum to zero")
    resid = cls.stacked[:, Z.cells] - Z.labels[None, :]
    return (resid ** 2) @ Z.weights / s


def erm_select(Z: WeightedDataset, cls: HypothesisClass) -> int:
    """Index of the empirical risk minimizer; ties go to the lowest index."""
    if len(cls) == 0:
        raise EmptyClass("hypothesis class is empty")
    return int(np.argmin(empirical_risks(cls, Z)))


def expected_risk(f, spec: ResponseSpec) -> float:
    """E (f(x) - y)^2, exact over the feature grid; uniform noise adds noise^2 / 3."""
    f = np.asarray(f, dtype=float)
    if f.shape != spec.table.shape:
        raise ShapeMismatch(f"predictor shape {f.shape} does not match response shape {spec.table.shape}")
    if f.size > MAX_CELLS:
        raise AlphabetTooLarge(f"table has {f.size} cells (limit {MAX_CELLS})")
    sq = expectation((f - spec.table) ** 2, spec.edge_dist).ravel()[0]
    return float(sq) + spec.noise ** 2 / 3.0


def class_optimum(cls: HypothesisClass, spec: ResponseSpec) -> tuple[int, float]:
    risks = [expected_risk(t, spec) for t in cls.tables]
    i = int(np.argmin(risks))
    return i, risks[i]


def method_weights(h: Hypergraph, method: str) -> WeightVector:
    if method == "eqw":
        return eqw_weights(h)
    if method == "ind":
        return ind_weights(h)
    if method == "svalue":
        return s_value(h).weights
    raise BadParams(f"unknown weighting method {method!r}")


@dataclass(frozen=True)
class ErmRecord:
    method: str
    repetition: int
    selected_index: int
    empirical_risk: float
    excess_risk: float


@dataclass(frozen=True)
class MethodSummary:
    method: str
    total_weight: float
    mean: float
    se: float
    quantiles: dict[float, float]

    def tail_frequency(self, excess: np.ndarray, epsilon: float) -> tuple[float, float]:
        """Fraction of repetitions with excess risk >= epsilon, and its binomial se."""
        p = float(np.mean(excess >= epsilon))
        return p, math.sqrt(p * (1 - p) / len(excess))


@dataclass
class ExperimentResult:
    records: list[ErmRecord]
    summaries: dict[str, MethodSummary]
    optimum_index: int
    optimum_risk: float
    excess: dict[str, np.ndarray] = field(repr=False, default_factory=dict)

    def tail_frequency(self, method: str, epsilon: float) -> tuple[float, float]:
        return self.summaries[method].tail_frequency(self.excess[method], epsilon)


QUANTILES = (0.1, 0.5, 0.9)


def excess_risk_experiment(h: Hypergraph, spec: ResponseSpec, cls: HypothesisClass,
                           methods: Sequence[str] = METHODS, repetitions: int = 200,
                           seed: int = 0) -> ExperimentResult:
    """Repeated ERM on fresh networked samples, one weighting per method.

    Repetition r uses trial r of the sample stream for every method, so the
    methods are compared on identical data.
    """
    if repetitions < 1:
        raise BadParams("need at least one repetition")
    if not methods:
        raise BadParams("no methods given")
    weights = {m: method_weights(h, m) for m in methods}
    for m, w in weights.items():
        if not is_feasible(h, w):
            raise BadParams(f"{m} weights are not feasible")
    opt_i, opt_r = class_optimum(cls, spec)
    risks = np.array([expected_risk(t, spec) for t in cls.tables])
    p = plan(h, spec)
    records: list[ErmRecord] = []
    excess = {m: np.empty(repetitions) for m in methods}
    for r in range(repetitions):
        sample = draw_from_plan(p, seed, r)
        for m in methods:
            Z = WeightedDataset.from_sample(sample, weights[m])
            emp = empirical_risks(cls, Z)
            i = int(np.argmin(emp))
            ex = float(risks[i] - opt_r)
            excess[m][r] = ex
            records.append(ErmRecord(m, r, i, float(emp[i]), ex))
    summaries = {}
    for m in methods:
        e = excess[m]
        se = float(e.std(ddof=1)) / math.sqrt(repetitions) if repetitions > 1 else 0.0
        summaries[m] = MethodSummary(m, weights[m].total, float(e.mean()), se,
                                     {q: float(np.quantile(e, q)) for q in QUANTILES})
    return ExperimentResult(records, summaries, opt_i, opt_r, excess)


# -- the star-heavy learning fixture --------------------------------------------------------

def star_heavy_fixture(n: int = 20) -> Hypergraph:
    """star(n) next to n disjoint edges, as one 2-partite hypergraph."""
    return disjoint_union(gen_star(n), gen_disjoint(n))


def linear_spec(a: float = 1.0, b: float = 0.5, noise: float = 0.5) -> ResponseSpec:
    """y = a x0 + b x1 + uniform noise, with uniform +-1 features on both parts."""
    x = np.array([-1.0, 1.0])
    return ResponseSpec(DiscreteKDist.uniform([2, 2]), a * x[:, None] + b * x[None, :], noise)


def part1_class(spec: ResponseSpec, intercepts: Sequence[float] = tuple(np.linspace(-0.5, 0.5, 9)),
                slopes: Sequence[float] = tuple(np.linspace(0.0, 1.0, 9))) -> HypothesisClass:
    """Predictors c + d x1 that do not see the part-0 feature.

    Whatever the response owes to x0 then acts as an effect shared by every
    example on the same part-0 vertex, which is where the weighting matters.
    """
    x = np.array([-1.0, 1.0])
    tables = [np.broadcast_to(c + d * x[None, :], (2, 2)) for c in intercepts for d in slopes]
    return HypothesisClass.for_spec(tables, spec)
