"""Closed-form tail bounds for averages of networked random variables.

All bounds are one-sided: they bound Pr(average - mean >= epsilon).  Values
are clipped to [0, 1]; the unclipped formula value is kept in
``BoundResult.raw``.

Range conventions: ``M`` bounds |X_i - mean|.  The U-statistic bounds take the
kernel range ``b - a`` explicitly and use M = (b - a) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import BadParams, MissingChiStar, TooLarge
from .hypergraph import Hypergraph
from .lp import LpProblem, solve_lp

CHI_STAR_MAX_EDGES = 12
SAMPLE_ERROR_KINDS = ("iid", "eqw_chromatic", "eqw_omega", "s_value")


@dataclass(frozen=True)
class BoundQuery:
    epsilon: float
    M: float | None = None
    sigma2: float | None = None
    total_weight: float | None = None
    n: int | None = None
    omega: float | None = None
    chi_star: float | None = None
    r: int | None = None
    range_width: float | None = None
    covering: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise BadParams("epsilon must be positive")
        if self.M is not None and not self.M > 0:
            raise BadParams("M must be positive")
        if self.sigma2 is not None and self.sigma2 < 0:
            raise BadParams("sigma2 must be nonnegative")
        if self.total_weight is not None and not self.total_weight > 0:
            raise BadParams("total weight |w| must be positive")

    def with_(self, **changes) -> "BoundQuery":
        return replace(self, **changes)


@dataclass(frozen=True)
class BoundResult:
    kind: str
    value: float
    raw: float


def _result(kind: str, exponent: float, prefactor: float = 1.0) -> BoundResult:
    raw = prefactor * math.exp(exponent)
    return BoundResult(kind, min(1.0, max(0.0, raw)), raw)


def _need(q: BoundQuery, *names: str):
    vals = []
    for name in names:
        v = getattr(q, name)
        if v is None:
            raise BadParams(f"bound needs {name}")
        vals.append(v)
    return vals


def bennett_h(a: float) -> float:
    """h(a) = (1 + a) log(1 + a) - a."""
    return (1.0 + a) * math.log1p(a) - a


def networked_bennett(q: BoundQuery) -> BoundResult:
    """exp(-(|w| eps / 2M) log(1 + M eps / sigma^2))."""
    w, M, s2 = _need(q, "total_weight", "M", "sigma2")
    if s2 <= 0:
        raise BadParams("the Bennett-type bound needs sigma2 > 0")
    eps = q.epsilon
    return _result("bennett", -(w * eps / (2.0 * M)) * math.log1p(M * eps / s2))


def networked_bennett_h(q: BoundQuery) -> BoundResult:
    """Sharper form exp(-(|w| sigma^2 / M^2) h(M eps / sigma^2)) behind the three averaged bounds."""
    w, M, s2 = _need(q, "total_weight", "M", "sigma2")
    if s2 <= 0:
        raise BadParams("the Bennett-type bound needs sigma2 > 0")
    return _result("bennett_h", -(w * s2 / M ** 2) * bennett_h(M * q.epsilon / s2))


def networked_bernstein(q: BoundQuery) -> BoundResult:
    """exp(-|w| eps^2 / (2 (sigma^2 + M eps / 3)))."""
    w, M, s2 = _need(q, "total_weight", "M", "sigma2")
    eps = q.epsilon
    return _result("bernstein", -w * eps ** 2 / (2.0 * (s2 + M * eps / 3.0)))


def networked_hoeffding(q: BoundQuery) -> BoundResult:
    """exp(-|w| eps^2 / (2 M^2))."""
    w, M = _need(q, "total_weight", "M")
    return _result("hoeffding", -w * q.epsilon ** 2 / (2.0 * M ** 2))


def weighted_hoeffding(weights: Sequence[float], deviation: float, M: float) -> BoundResult:
    """Classical bound for independent summands: exp(-t^2 / (2 sum w_i^2 M^2)) on Pr(w.X >= t)."""
    w = np.asarray(weights, dtype=float)
    if not M > 0 or not deviation > 0:
        raise BadParams("need M > 0 and deviation > 0")
    return _result("weighted_hoeffding", -deviation ** 2 / (2.0 * float(w @ w) * M ** 2))


def janson_bounds(q: BoundQuery) -> tuple[BoundResult, BoundResult]:
    """Equal-weight bounds in terms of the fractional hyperedge-chromatic number chi*."""
    if q.chi_star is None:
        raise MissingChiStar("Janson bounds need chi_star")
    if q.chi_star < 1:
        raise BadParams("chi_star must be >= 1")
    n, M = _need(q, "n", "M")
    chi, eps = q.chi_star, q.epsilon
    first = _result("janson_hoeffding", -n * eps ** 2 / (2.0 * chi * M ** 2))
    if q.sigma2 is None:
        raise BadParams("the second Janson form needs sigma2")
    second = _result("janson_bernstein", -8.0 * n * eps ** 2 / (25.0 * chi * (q.sigma2 + M * eps / 3.0)))
    return first, second


def eqw_bounds(q: BoundQuery) -> tuple[BoundResult, BoundResult, BoundResult]:
    """Equal weighting viewed as the feasible weights 1/omega: |w| = n / omega."""
    n, omega = _need(q, "n", "omega")
    if omega < 1:
        raise BadParams("omega must be >= 1")
    q2 = q.with_(total_weight=n / omega)
    out = (networked_bennett(q2), networked_bernstein(q2), networked_hoeffding(q2))
    return tuple(replace(b, kind="eqw_" + b.kind) for b in out)


def u_statistic_bounds(q: BoundQuery) -> tuple[BoundResult, BoundResult, BoundResult]:
    """(improved Hoeffding, improved Bernstein, classic floor-based Hoeffding) for one-sample U statistics.

    The Bernstein form takes M = (b - a) / 2 and reads the deviation in the
    ``M * lambda / 3`` term as epsilon.
    """
    n, r, width = _need(q, "n", "r", "range_width")
    if not 1 <= r <= n:
        raise BadParams("need n >= r >= 1")
    if not width > 0:
        raise BadParams("range b - a must be positive")
    eps = q.epsilon
    improved = _result("u_hoeffding_improved", -2.0 * n * eps ** 2 / (r * width ** 2))
    if q.sigma2 is None:
        raise BadParams("the Bernstein form needs sigma2")
    M = width / 2.0 if q.M is None else q.M
    bern = _result("u_bernstein_improved", -2.0 * (n / r) * eps ** 2 / (q.sigma2 + M * eps / 3.0))
    classic = _result("u_hoeffding_classic", -2.0 * (n // r) * eps ** 2 / width ** 2)
    return improved, bern, classic


def sample_error_bound(kind: str, q: BoundQuery) -> BoundResult:
    """covering * exp(-rate * eps) bounds on Pr(sample error >= eps).

    iid           N eps / (300 M^4)
    eqw_chromatic 3 N eps / (1400 chi* M^4)
    eqw_omega     N eps / (300 omega M^4)
    s_value       s eps / (300 M^2)   (M squared, not to the fourth)
    ``covering`` stands in for the covering number, e.g. the size of a finite class.
    """
    (M,) = _need(q, "M")
    eps, cov = q.epsilon, q.covering
    if not cov > 0:
        raise BadParams("covering must be positive")
    if kind == "iid":
        (N,) = _need(q, "n")
        expo = -N * eps / (300.0 * M ** 4)
    elif kind == "eqw_chromatic":
        if q.chi_star is None:
            raise MissingChiStar("eqw_chromatic needs chi_star")
        (N,) = _need(q, "n")
        expo = -3.0 * N * eps / (1400.0 * q.chi_star * M ** 4)
    elif kind == "eqw_omega":
        N, omega = _need(q, "n", "omega")
        expo = -N * eps / (300.0 * omega * M ** 4)
    elif kind == "s_value":
        (s,) = _need(q, "total_weight")
        expo = -s * eps / (300.0 * M ** 2)
    else:
        raise BadParams(f"unknown sample-error bound kind {kind!r}")
    return _result("sample_error_" + kind, expo, cov)


def markov_bound(mean: float, a: float) -> BoundResult:
    """q / (a + q) for nonnegative X with E X = q and deviation a."""
    if mean < 0 or not a > 0:
        raise BadParams("need mean >= 0 and a > 0")
    raw = mean / (a + mean)
    return BoundResult("markov", raw, raw)


def iid_hoeffding(n: int, epsilon: float, M: float) -> BoundResult:
    return _result("iid_hoeffding", -n * epsilon ** 2 / (2.0 * M ** 2))


def g_concentration(values, probs, g: Callable[[np.ndarray], np.ndarray]) -> float:
    """E g(X - E X) for a finite distribution."""
    x = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    return float(p @ g(x - p @ x))


def _matchings(h: Hypergraph) -> list[list[int]]:
    """All maximal matchings (each is a list of edge indices)."""
    n = h.num_edges
    masks = [sum(1 << v for v in e) for e in h.edges]
    out = []

    def grow(i, used, chosen):
        if i == n:
            if all(used & masks[j] for j in range(n) if j not in chosen):
                out.append(list(chosen))
            return
        if not used & masks[i]:
            chosen.append(i)
            grow(i + 1, used | masks[i], chosen)
            chosen.pop()
        grow(i + 1, used, chosen)

    grow(0, 0, [])
    return out


def chi_star_oracle(h: Hypergraph) -> float:
    """Fractional hyperedge-chromatic number by LP over the maximal matchings.

    min sum_M y_M  s.t. every edge is covered with total weight >= 1.
    Restricting to maximal matchings loses nothing: any matching extends to a
    maximal one that covers at least the same edges.
    """
    n = h.num_edges
    if n > CHI_STAR_MAX_EDGES:
        raise TooLarge(f"chi* oracle handles at most {CHI_STAR_MAX_EDGES} edges, got {n}")
    if n == 0:
        return 0.0
    ms = _matchings(h)
    cover = np.zeros((n, len(ms)))
    for j, mt in enumerate(ms):
        cover[mt, j] = 1.0
    # max -sum y  s.t.  -cover @ y <= -1
    value, _ = solve_lp(LpProblem(-np.ones(len(ms)), -cover, -np.ones(n)))
    return -value
