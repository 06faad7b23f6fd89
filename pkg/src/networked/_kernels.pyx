# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: simplex pivoting and Monte Carlo trial sums.

Semantics match ``_fallback.py`` exactly; see that module for documentation.
"""

from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

import numpy as np

DEF OPTIMAL = 0
DEF UNBOUNDED = 1
DEF ITERATION_LIMIT = 2

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TWO_M53 = 1.0 / 9007199254740992.0
cdef double TIE = 1e-12


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double slot_uniform(uint64_t base, uint64_t slot) noexcept nogil:
    return <double>(mix64(base + (slot + 1) * GOLDEN) >> 11) * TWO_M53


def simplex_iterate(double[:, ::1] T, int64_t[::1] basis, Py_ssize_t m,
                    Py_ssize_t obj_row, Py_ssize_t ncols, Py_ssize_t max_iter,
                    double tol):
    cdef Py_ssize_t nrows = T.shape[0]
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it = 0
    cdef Py_ssize_t e, r, i, j, c, nnz
    cdef double best, ratio, piv, f
    cdef int64_t bbest
    cdef int status = OPTIMAL
    cdef Py_ssize_t* nzcols = <Py_ssize_t*> malloc((rhs + 1) * sizeof(Py_ssize_t))
    if nzcols == NULL:
        raise MemoryError()
    try:
        with nogil:
            while True:
                e = -1
                for j in range(ncols):
                    if T[obj_row, j] < -tol:
                        e = j
                        break
                if e < 0:
                    status = OPTIMAL
                    break
                if it >= max_iter:
                    status = ITERATION_LIMIT
                    break
                best = 0.0
                r = -1
                for i in range(m):
                    if T[i, e] > tol:
                        ratio = T[i, rhs] / T[i, e]
                        if r < 0 or ratio < best:
                            best = ratio
                            r = i
                if r < 0:
                    status = UNBOUNDED
                    break
                bbest = basis[r]
                for i in range(m):
                    if T[i, e] > tol:
                        ratio = T[i, rhs] / T[i, e]
                        if ratio <= best + TIE and basis[i] < bbest:
                            bbest = basis[i]
                            r = i
                piv = T[r, e]
                nnz = 0
                for c in range(rhs + 1):
                    if T[r, c] != 0.0:
                        T[r, c] = T[r, c] / piv
                        nzcols[nnz] = c
                        nnz += 1
                for i in range(nrows):
                    if i == r:
                        continue
                    f = T[i, e]
                    if f != 0.0:
                        for j in range(nnz):
                            c = nzcols[j]
                            T[i, c] = T[i, c] - f * T[r, c]
                        T[i, e] = 0.0
                basis[r] = e
                it += 1
    finally:
        free(nzcols)
    return status, it


def trial_sums(uint64_t seed, int64_t start, int64_t count,
               const double[:, ::1] cdf, const int64_t[::1] cdf_len, const int64_t[::1] vgroup,
               const int64_t[:, ::1] cells, const int64_t[::1] strides, const double[::1] table,
               double noise, const double[::1] weights, double[::1] out):
    cdef Py_ssize_t nv = vgroup.shape[0]
    cdef Py_ssize_t ne = cells.shape[0]
    cdef Py_ssize_t r = cells.shape[1]
    cdef Py_ssize_t t, v, i, d, g, s, last
    cdef uint64_t key = mix64(seed + GOLDEN)
    cdef uint64_t base
    cdef double u, acc, y
    cdef int64_t idx
    cdef int64_t[::1] sym = np.empty(nv, dtype=np.int64)
    with nogil:
        for t in range(count):
            base = mix64(key + <uint64_t>(start + t) * GOLDEN)
            for v in range(nv):
                u = slot_uniform(base, <uint64_t>v)
                g = vgroup[v]
                last = cdf_len[g] - 1
                s = 0
                while s < last and u >= cdf[g, s]:
                    s += 1
                sym[v] = s
            acc = 0.0
            for i in range(ne):
                idx = 0
                for d in range(r):
                    idx = idx + sym[cells[i, d]] * strides[d]
                y = table[idx]
                if noise > 0.0:
                    u = slot_uniform(base, <uint64_t>(nv + i))
                    y = y + noise * (2.0 * u - 1.0)
                acc = acc + weights[i] * y
            out[t] = acc
