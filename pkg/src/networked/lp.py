"""Dense two-phase primal simplex for  max c.x  s.t.  A x <= b,  x >= 0.

Entering and leaving variables follow Bland's rule, so the method terminates
on degenerate problems (the fractional matching LPs are heavily degenerate).
The pivot loop runs in the compiled kernel when available.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import BadParams, Infeasible, IterationLimit, Unbounded

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9


@dataclass(frozen=True)
class LpProblem:
    """Maximize ``c @ x`` subject to ``A @ x <= b`` and ``x >= 0``."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        A = np.asarray(self.A, dtype=float)
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if A.ndim != 2:
            A = A.reshape(len(b), len(c))
        if A.shape != (len(b), len(c)):
            raise BadParams(f"A has shape {A.shape}, expected {(len(b), len(c))}")
        if not np.all(np.isfinite(b)) or not np.all(np.isfinite(A)) or not np.all(np.isfinite(c)):
            raise BadParams("LP data must be finite")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def num_vars(self) -> int:
        return len(self.c)

    @property
    def num_rows(self) -> int:
        return len(self.b)


class LpResult(NamedTuple):
    value: float
    x: np.ndarray


def solve_lp(p: LpProblem, max_iter: int | None = None, backend: str = "auto") -> LpResult:
    kern = _backend.get(backend)
    m, n = p.num_rows, p.num_vars
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    neg = np.flatnonzero(p.b < 0)
    q = len(neg)
    width = n + m + q
    # rows: m constraints, phase-2 objective, phase-1 objective (if any)
    T = np.zeros((m + 1 + (q > 0), width + 1))
    T[:m, :n] = p.A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = p.b
    T[m, :n] = -p.c
    basis = np.arange(n, n + m, dtype=np.int64)
    if q:
        T[neg, :] *= -1.0
        T[neg, n + m + np.arange(q)] = 1.0
        basis[neg] = n + m + np.arange(q)
        T[m + 1, :] = -T[neg, :].sum(axis=0)
        T[m + 1, n + m:width] = 0.0
        status, it1 = kern.simplex_iterate(T, basis, m, m + 1, width, max_iter, PIVOT_TOL)
        if status == 2:
            raise IterationLimit(f"phase 1 hit {max_iter} pivots")
        if T[m + 1, -1] < -1e-7 * max(1.0, np.abs(p.b).max()):
            raise Infeasible(f"phase 1 optimum {T[m + 1, -1]:.3g} < 0")
        _drive_out_artificials(T, basis, m, n + m)
        max_iter -= it1
    status, it2 = kern.simplex_iterate(T, basis, m, m, n + m, max_iter, PIVOT_TOL)
    if status == 1:
        raise Unbounded("objective is unbounded above")
    if status == 2:
        raise IterationLimit(f"simplex hit the pivot limit ({max_iter})")
    x = np.zeros(width)
    x[basis] = T[:m, -1]
    x = np.clip(x[:n], 0.0, None)
    value = float(T[m, -1])
    log.debug("solve_lp: %d rows, %d vars, %d phase-2 pivots, value %.12g", m, n, it2, value)
    return LpResult(value, x)


def _drive_out_artificials(T, basis, m, first_art):
    """Pivot zero-level artificials out of the basis where a real column allows it."""
    for r in np.flatnonzero(basis >= first_art):
        row = T[r, :first_art]
        nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
        if nz.size == 0:
            continue  # redundant row; the artificial stays basic at zero
        e = nz[0]
        T[r] /= T[r, e]
        for i in range(T.shape[0]):
            if i != r and T[i, e] != 0.0:
                T[i] -= T[i, e] * T[r]
        basis[r] = e


def vertex_enumeration(p: LpProblem, tol: float = 1e-9) -> LpResult:
    """Brute-force optimum over all basic feasible solutions (small n only).

    Every vertex of {A x <= b, x >= 0} makes n of the m + n constraints tight;
    try every such choice, keep the feasible ones, return the best.  Assumes a
    bounded optimum exists.
    """
    m, n = p.num_rows, p.num_vars
    if n > 6:
        raise BadParams("vertex enumeration is meant for tiny LPs")
    G = np.vstack([p.A, -np.eye(n)])
    h = np.concatenate([p.b, np.zeros(n)])
    best = None
    for rows in itertools.combinations(range(m + n), n):
        sub = G[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, h[list(rows)])
        if np.all(G @ x <= h + tol):
            val = float(p.c @ x)
            if best is None or val > best.value:
                best = LpResult(val, x)
    if best is None:
        raise Infeasible("no basic feasible solution")
    return best
