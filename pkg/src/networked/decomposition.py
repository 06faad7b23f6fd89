"""Exact ANOVA (Hoeffding) decomposition of tabulated k-partite functions.

A subset S of the k parts is encoded as a bitmask; bit l set means part l is
in S.  Masks are processed in increasing order, so every proper subset of S
is finished before S itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import AlphabetTooLarge, BadParams, ShapeMismatch, ZeroWeight
from .hypergraph import Hypergraph, shared_index_sets

MAX_CELLS = 10 ** 7
PROB_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteKDist:
    """Independent per-part marginals over finite alphabets."""

    marginals: tuple[np.ndarray, ...]

    def __post_init__(self):
        ms = []
        for i, p in enumerate(self.marginals):
            p = np.asarray(p, dtype=float).ravel()
            if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > PROB_TOL:
                raise BadParams(f"marginal {i} is not a probability vector")
            p.setflags(write=False)
            ms.append(p)
        object.__setattr__(self, "marginals", tuple(ms))

    @property
    def k(self) -> int:
        return len(self.marginals)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.marginals)

    @classmethod
    def uniform(cls, sizes: Sequence[int]) -> "DiscreteKDist":
        return cls(tuple(np.full(a, 1.0 / a) for a in sizes))

    def joint(self) -> np.ndarray:
        """Product-measure weights over the full table."""
        out = np.ones(())
        for p in self.marginals:
            out = np.multiply.outer(out, p)
        return out


def expectation(arr: np.ndarray, d: DiscreteKDist, axes: Sequence[int] | None = None) -> np.ndarray:
    """Average ``arr`` over the given axes (default: every non-singleton axis), keeping dims."""
    out = np.asarray(arr, dtype=float)
    if axes is None:
        axes = [i for i in range(out.ndim) if out.shape[i] > 1]
    for i in axes:
        shape = [1] * out.ndim
        shape[i] = -1
        out = (out * d.marginals[i].reshape(shape)).sum(axis=i, keepdims=True)
    return out


def submasks(mask: int):
    """All submasks of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def mask_parts(mask: int, k: int) -> tuple[int, ...]:
    return tuple(l for l in range(k) if mask >> l & 1)


@dataclass(frozen=True)
class AnovaDecomposition:
    """Components mu_S (broadcastable arrays, singleton on parts outside S) and their variances."""

    k: int
    mean: float
    components: dict[int, np.ndarray] = field(repr=False)
    variances: dict[int, float]
    total_variance: float

    def component(self, mask: int, shape: tuple[int, ...] | None = None) -> np.ndarray:
        c = self.components[mask]
        return c if shape is None else np.broadcast_to(c, shape)

    def recompose(self) -> np.ndarray:
        """Sum of all components; equals the centered function."""
        out = 0.0
        for c in self.components.values():
            out = out + c
        return out

    def variance(self, parts) -> float:
        mask = sum(1 << l for l in parts)
        return self.variances[mask]


def anova_decompose(f, d: DiscreteKDist) -> AnovaDecomposition:
    f = np.asarray(f, dtype=float)
    if f.shape != d.shape:
        raise ShapeMismatch(f"table shape {f.shape} does not match alphabets {d.shape}")
    if f.size > MAX_CELLS:
        raise AlphabetTooLarge(f"table has {f.size} cells (limit {MAX_CELLS})")
    k = d.k
    mean = float(expectation(f, d).ravel()[0]) if k else float(f)
    fc = f - mean
    components: dict[int, np.ndarray] = {}
    variances: dict[int, float] = {}
    full = (1 << k) - 1
    for mask in range(full + 1):
        outside = [i for i in range(k) if not mask >> i & 1]
        mu = expectation(fc, d, outside)
        for sub in submasks(mask):
            if sub != mask:
                mu = mu - components[sub]
        components[mask] = mu
        variances[mask] = float(expectation(mu ** 2, d).ravel()[0])
    total = float(expectation(fc ** 2, d).ravel()[0])
    return AnovaDecomposition(k, mean, components, variances, total)


def _normalize_variances(variances: Mapping, k: int) -> np.ndarray:
    out = np.zeros(1 << k)
    for key, val in variances.items():
        mask = key if isinstance(key, (int, np.integer)) else sum(1 << l for l in key)
        if not 0 <= mask < 1 << k:
            raise BadParams(f"subset {key!r} is not a subset of the {k} parts")
        out[mask] = val
    return out


def covariance_matrix(h: Hypergraph, variances: Mapping, noise_variance: float = 0.0) -> np.ndarray:
    """Sigma_ij = sum of sigma_T^2 over all T inside the parts where edges i and j coincide.

    ``variances`` maps a subset (bitmask or iterable of part ids) to sigma_T^2.
    Independent label noise only adds to the diagonal.
    """
    J = shared_index_sets(h)
    k = h.num_parts
    sig = _normalize_variances(variances, k)
    cum = np.array([sum(sig[t] for t in submasks(mask)) for mask in range(1 << k)])
    cov = cum[J]
    cov[np.diag_indices_from(cov)] += noise_variance
    return cov


def weighted_variance(w, cov: np.ndarray) -> float:
    """Variance of sum_i w_i X_i / |w|_1."""
    w = np.asarray(getattr(w, "weights", w), dtype=float)
    if cov.shape != (len(w), len(w)):
        raise ShapeMismatch(f"covariance is {cov.shape}, weights have length {len(w)}")
    s = np.abs(w).sum()
    if s <= 0:
        raise ZeroWeight("weights sum to zero")
    return float(w @ cov @ w) / s ** 2
