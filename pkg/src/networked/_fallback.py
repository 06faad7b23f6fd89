"""Pure numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` operation for operation; the Monte Carlo kernel
is bitwise identical to the compiled one (same hash stream, same summation
order), which the test suite checks.
"""

from __future__ import annotations

import numpy as np

OPTIMAL, UNBOUNDED, ITERATION_LIMIT = 0, 1, 2

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_M53 = 1.0 / 9007199254740992.0
_TIE = 1e-12


def mix64(z):
    """splitmix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def seed_key(seed: int) -> np.uint64:
    with np.errstate(over="ignore"):
        return mix64(np.uint64(seed % 2**64) + _GOLDEN)[()]


def trial_bases(seed: int, trials) -> np.ndarray:
    t = np.asarray(trials, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(seed_key(seed) + t * _GOLDEN)


def slot_uniforms(bases: np.ndarray, slots) -> np.ndarray:
    """Uniforms in [0, 1) for every (trial base, slot) pair; shape (len(bases), len(slots))."""
    s = np.asarray(slots, dtype=np.uint64) + np.uint64(1)
    with np.errstate(over="ignore"):
        h = mix64(bases[:, None] + s[None, :] * _GOLDEN)
    return (h >> np.uint64(11)).astype(np.float64) * _TWO_M53


def draw_symbols(bases, cdf, cdf_len, vgroup):
    """Feature symbol of every vertex in every trial; shape (len(bases), len(vgroup))."""
    u = slot_uniforms(bases, np.arange(len(vgroup)))
    sym = np.empty(u.shape, dtype=np.int64)
    for g in np.unique(vgroup):
        verts = np.flatnonzero(vgroup == g)
        sym[:, verts] = np.searchsorted(cdf[g, : cdf_len[g] - 1], u[:, verts], side="right")
    return sym


def simplex_iterate(T, basis, m, obj_row, ncols, max_iter, tol):
    """Bland-rule primal simplex pivots on tableau ``T`` in place.

    Rows ``0..m-1`` are constraints, the last column is the right-hand side,
    row ``obj_row`` holds reduced costs (negative means improving).  Only
    columns below ``ncols`` may enter.  Returns ``(status, iterations)``.
    """
    rhs = T.shape[1] - 1
    it = 0
    while True:
        neg = np.flatnonzero(T[obj_row, :ncols] < -tol)
        if neg.size == 0:
            return OPTIMAL, it
        if it >= max_iter:
            return ITERATION_LIMIT, it
        e = neg[0]
        col = T[:m, e]
        pos = np.flatnonzero(col > tol)
        if pos.size == 0:
            return UNBOUNDED, it
        ratios = T[pos, rhs] / col[pos]
        best = ratios.min()
        cand = pos[ratios <= best + _TIE]
        r = cand[np.argmin(basis[cand])]
        T[r] /= T[r, e]
        rows = np.flatnonzero(T[:, e])
        rows = rows[rows != r]
        cols = np.flatnonzero(T[r])
        if rows.size:
            T[np.ix_(rows, cols)] -= np.outer(T[rows, e], T[r, cols])
            T[rows, e] = 0.0
        basis[r] = e
        it += 1


def trial_sums(seed, start, count, cdf, cdf_len, vgroup, cells, strides, table,
               noise, weights, out, batch=8192):
    """Per-trial weighted sums  sum_i w_i y_i  for trials start..start+count-1."""
    nv = len(vgroup)
    ne = cells.shape[0]
    for b0 in range(0, count, batch):
        b1 = min(count, b0 + batch)
        bases = trial_bases(seed, np.arange(start + b0, start + b1))
        sym = draw_symbols(bases, cdf, cdf_len, vgroup)
        flat = np.zeros((b1 - b0, ne), dtype=np.int64)
        for d in range(cells.shape[1]):
            flat += sym[:, cells[:, d]] * strides[d]
        y = table[flat]
        if noise > 0.0:
            un = slot_uniforms(bases, nv + np.arange(ne))
            y = y + noise * (2.0 * un - 1.0)
        acc = np.zeros(b1 - b0)
        for i in range(ne):
            acc = acc + weights[i] * y[:, i]
        out[b0:b1] = acc
