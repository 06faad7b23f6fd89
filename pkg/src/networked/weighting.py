"""Example weighting schemes: EQW, IND, s-value and minimax variance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadParams, NotKPartite, TooLarge
from .hypergraph import (
    Hypergraph,
    WeightVector,
    greedy_matching,
    is_feasible,
    max_degree,
)
from .lp import LpProblem, solve_lp

MINIMAX_ITERATIONS = 20_000
MINIMAX_PATIENCE = 2_000
MINIMAX_MIN_IMPROVEMENT = 1e-9
ORACLE_MAX_EDGES = 4


@dataclass(frozen=True)
class SValueResult:
    s: float
    weights: WeightVector

    def to_dict(self) -> dict:
        return {"s": self.s, "weights": self.weights.to_list()}


@dataclass(frozen=True)
class MinimaxWeights:
    """Simplex weights w' and their worst-case variance t = max_l w'^T D_l w'."""

    weights: np.ndarray
    worst_variance: float
    iterations: int = 0

    def unnormalized(self) -> np.ndarray:
        """w = w'/t, the solution of the equivalent  max sum(w)  quadratic program."""
        return self.weights / self.worst_variance


def s_value_lp(h: Hypergraph) -> LpProblem:
    """max sum(w)  s.t.  every vertex load <= 1, w >= 0  (isolated vertices dropped)."""
    A = h.incidence
    A = A[A.any(axis=1)]
    return LpProblem(np.ones(h.num_edges), A, np.ones(A.shape[0]))


def s_value(h: Hypergraph, backend: str = "auto") -> SValueResult:
    if h.num_edges == 0:
        return SValueResult(0.0, WeightVector(np.zeros(0), feasible=True))
    value, x = solve_lp(s_value_lp(h), backend=backend)
    # clip round-off so the returned vector passes the feasibility check
    loads = h.incidence @ x
    over = loads.max(initial=0.0)
    if over > 1.0:
        x = x / over
    w = WeightVector(x, feasible=is_feasible(h, x))
    return SValueResult(float(value), w)


def eqw_weights(h: Hypergraph) -> WeightVector:
    """All weights 1/omega(H), the largest feasible equal weighting."""
    if h.num_edges == 0:
        return WeightVector(np.zeros(0), feasible=True)
    return WeightVector(np.full(h.num_edges, 1.0 / max_degree(h)), feasible=True)


def ind_weights(h: Hypergraph) -> WeightVector:
    w = np.zeros(h.num_edges)
    w[greedy_matching(h)] = 1.0
    return WeightVector(w, feasible=True)


def _part_loads(cells: np.ndarray, num_vertices: int, w: np.ndarray) -> list[np.ndarray]:
    return [np.bincount(cells[:, l], weights=w, minlength=num_vertices) for l in range(cells.shape[1])]


def worst_case_variance(h: Hypergraph, w) -> float:
    """max over parts l of w^T D_l w, with (D_l)_ij = 1 iff edges i, j share their part-l vertex."""
    w = np.asarray(getattr(w, "weights", w), dtype=float)
    cells = h.cells_by_part()
    return float(max((W ** 2).sum() for W in _part_loads(cells, h.num_vertices, w)))


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(v) + 1)
    rho = np.flatnonzero(u * k > css - 1.0)[-1]
    theta = (css[rho] - 1.0) / (rho + 1)
    return np.maximum(v - theta, 0.0)


def minimax_variance_weights(h: Hypergraph, iterations: int = MINIMAX_ITERATIONS) -> MinimaxWeights:
    """Projected subgradient descent on the worst-case variance over the simplex.

    Step size 1/sqrt(t), best iterate kept; stops early once the best value has
    improved by less than 1e-9 over the last 2000 iterations.
    """
    if not h.is_partite:
        raise NotKPartite("minimax weights need a k-partite hypergraph")
    n = h.num_edges
    if n == 0:
        raise BadParams("no edges to weight")
    cells = h.cells_by_part()
    w = np.full(n, 1.0 / n)
    best_w, best = w, np.inf
    last_mark, mark_value = 0, np.inf
    it = 0
    for it in range(1, iterations + 1):
        loads = _part_loads(cells, h.num_vertices, w)
        vals = [float((W ** 2).sum()) for W in loads]
        l = int(np.argmax(vals))
        if vals[l] < best:
            best, best_w = vals[l], w
        if it - last_mark >= MINIMAX_PATIENCE:
            if mark_value - best < MINIMAX_MIN_IMPROVEMENT:
                break
            last_mark, mark_value = it, best
        grad = 2.0 * loads[l][cells[:, l]]
        w = project_simplex(w - grad / np.sqrt(it))
    return MinimaxWeights(best_w, best, it)


def minimax_oracle(h: Hypergraph, resolution: float = 1e-3) -> MinimaxWeights:
    """Exhaustive grid search over the simplex; ground truth for tiny fixtures."""
    if not h.is_partite:
        raise NotKPartite("minimax weights need a k-partite hypergraph")
    n = h.num_edges
    if n > ORACLE_MAX_EDGES:
        raise TooLarge(f"oracle handles at most {ORACLE_MAX_EDGES} edges, got {n}")
    if n == 0:
        raise BadParams("no edges to weight")
    steps = int(round(1.0 / resolution))
    cells = h.cells_by_part()
    best, best_w = np.inf, None
    # enumerate integer compositions of `steps` into n parts, chunked over the first coordinate
    for first in range(steps + 1):
        rest = steps - first
        if n == 1:
            grid = np.array([[first]])
            if first != steps:
                continue
        elif n == 2:
            grid = np.array([[first, rest]])
        else:
            tails = _compositions(rest, n - 1)
            grid = np.column_stack([np.full(len(tails), first), tails])
        W = grid / steps
        vals = np.zeros(len(W))
        for l in range(cells.shape[1]):
            col = cells[:, l]
            loads = np.zeros((len(W), h.num_vertices))
            for i in range(n):
                loads[:, col[i]] += W[:, i]
            vals = np.maximum(vals, (loads ** 2).sum(axis=1))
        j = int(np.argmin(vals))
        if vals[j] < best:
            best, best_w = float(vals[j]), W[j]
    return MinimaxWeights(best_w, best)


def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        return np.array([[total]])
    if parts == 2:
        a = np.arange(total + 1)
        return np.column_stack([a, total - a])
    if parts == 3:
        i, j = np.triu_indices(total + 1)
        return np.column_stack([i, j - i, total - j])
    blocks = [np.column_stack([np.full(len(t), a), t])
              for a in range(total + 1) for t in [_compositions(total - a, parts - 1)]]
    return np.vstack(blocks)
