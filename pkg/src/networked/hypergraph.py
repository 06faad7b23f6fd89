"""Hypergraph representation of networked examples.

Vertices are objects, hyperedges are examples.  An edge is stored as a tuple
of distinct vertex ids; the tuple order is kept because a response function
reads the features of an edge in that order (for k-partite hypergraphs the
order is by part instead, see :meth:`Hypergraph.cells_by_part`).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadParams,
    DuplicateVertex,
    EmptyEdge,
    LengthMismatch,
    NotKPartite,
    OutOfRangeVertex,
    ParseError,
    TooLarge,
)

FEASIBILITY_TOL = 1e-9
EXACT_MATCHING_MAX_EDGES = 20


@dataclass(frozen=True, eq=False)
class Hypergraph:
    num_vertices: int
    edges: tuple[tuple[int, ...], ...]
    partition: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.num_vertices < 0:
            raise BadParams("num_vertices must be nonnegative")
        for i, e in enumerate(self.edges):
            if len(e) == 0:
                raise EmptyEdge(f"edge {i} is empty")
            for v in e:
                if not 0 <= v < self.num_vertices:
                    raise OutOfRangeVertex(f"edge {i} has vertex {v} outside [0, {self.num_vertices})")
            if len(set(e)) != len(e):
                raise DuplicateVertex(f"edge {i} repeats a vertex: {e}")
        if self.partition is not None:
            if len(self.partition) != self.num_vertices:
                raise NotKPartite("partition must assign a part to every vertex")
            if any(p < 0 for p in self.partition):
                raise NotKPartite("part indices must be nonnegative")
            k = self.num_parts
            for i, e in enumerate(self.edges):
                parts = sorted(self.partition[v] for v in e)
                if parts != list(range(k)):
                    raise NotKPartite(f"edge {i} does not meet each of the {k} parts exactly once")

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.num_vertices, self.edges, self.partition) == (
            other.num_vertices, other.edges, other.partition)

    def __hash__(self):
        return hash((self.num_vertices, self.edges, self.partition))

    def __repr__(self):
        kind = f"{self.num_parts}-partite" if self.partition is not None else "general"
        return f"Hypergraph({kind}, num_vertices={self.num_vertices}, num_edges={self.num_edges})"

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_parts(self) -> int:
        if self.partition is None:
            return 0
        return max(self.partition, default=-1) + 1

    @property
    def is_partite(self) -> bool:
        return self.partition is not None

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_vertices, dtype=np.int64)
        for e in self.edges:
            deg[list(e)] += 1
        return deg

    @cached_property
    def incidence(self) -> np.ndarray:
        """Dense (num_vertices, num_edges) 0/1 incidence matrix."""
        a = np.zeros((self.num_vertices, self.num_edges))
        for i, e in enumerate(self.edges):
            a[list(e), i] = 1.0
        return a

    def cells_by_part(self) -> np.ndarray:
        """(num_edges, k) array; column l holds the edge's vertex in part l."""
        if self.partition is None:
            raise NotKPartite("hypergraph has no partition")
        k = self.num_parts
        cells = np.empty((self.num_edges, k), dtype=np.int64)
        for i, e in enumerate(self.edges):
            for v in e:
                cells[i, self.partition[v]] = v
        return cells

    def to_dict(self) -> dict:
        return {
            "num_vertices": self.num_vertices,
            "edges": [list(e) for e in self.edges],
            "partition": None if self.partition is None else list(self.partition),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Hypergraph":
        try:
            return build(int(d["num_vertices"]), d["edges"], d.get("partition"))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed hypergraph object: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Hypergraph":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Nonnegative per-edge weights; ``total`` is |w|."""

    weights: np.ndarray
    feasible: bool | None = field(default=None, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        if w.ndim != 1:
            raise BadParams("weights must be one-dimensional")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def __len__(self):
        return len(self.weights)

    def to_list(self) -> list[float]:
        return [float(x) for x in self.weights]


def build(num_vertices: int, edges: Iterable[Iterable[int]], partition: Sequence[int] | None = None) -> Hypergraph:
    edge_tuple = tuple(tuple(int(v) for v in e) for e in edges)
    part = None if partition is None else tuple(int(p) for p in partition)
    return Hypergraph(int(num_vertices), edge_tuple, part)


def max_degree(h: Hypergraph) -> int:
    """omega(H): the largest number of edges sharing one vertex."""
    if h.num_vertices == 0:
        return 0
    return int(h.degrees.max())


def vertex_loads(h: Hypergraph, w) -> np.ndarray:
    w = np.asarray(getattr(w, "weights", w), dtype=float)
    if len(w) != h.num_edges:
        raise LengthMismatch(f"{len(w)} weights for {h.num_edges} edges")
    loads = np.zeros(h.num_vertices)
    for wi, e in zip(w, h.edges):
        loads[list(e)] += wi
    return loads


def is_feasible(h: Hypergraph, w, tol: float = FEASIBILITY_TOL) -> bool:
    w_arr = np.asarray(getattr(w, "weights", w), dtype=float)
    loads = vertex_loads(h, w_arr)
    if np.any(w_arr < -tol):
        return False
    return bool(np.all(loads <= 1.0 + tol))


def greedy_matching(h: Hypergraph) -> list[int]:
    """Maximal matching by scanning edges in index order."""
    used = np.zeros(h.num_vertices, dtype=bool)
    chosen = []
    for i, e in enumerate(h.edges):
        idx = list(e)
        if not used[idx].any():
            used[idx] = True
            chosen.append(i)
    return chosen


def exact_matching(h: Hypergraph) -> list[int]:
    """Maximum matching by branch and bound; test oracle for tiny inputs."""
    n = h.num_edges
    if n > EXACT_MATCHING_MAX_EDGES:
        raise TooLarge(f"exact matching limited to {EXACT_MATCHING_MAX_EDGES} edges, got {n}")
    masks = [sum(1 << v for v in e) for e in h.edges]
    best: list[int] = []

    def search(i, used, chosen):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if i == n or len(chosen) + (n - i) <= len(best):
            return
        if not used & masks[i]:
            chosen.append(i)
            search(i + 1, used | masks[i], chosen)
            chosen.pop()
        search(i + 1, used, chosen)

    search(0, 0, [])
    return best


def shared_index_sets(h: Hypergraph) -> np.ndarray:
    """Bitmask matrix J: bit l of J[i, j] is set iff edges i, j share their part-l vertex."""
    cells = h.cells_by_part()
    k = cells.shape[1]
    out = np.zeros((h.num_edges, h.num_edges), dtype=np.int64)
    for l in range(k):
        col = cells[:, l]
        out |= (col[:, None] == col[None, :]).astype(np.int64) << l
    return out


def mask_to_parts(mask: int) -> frozenset[int]:
    return frozenset(l for l in range(int(mask).bit_length()) if mask >> l & 1)


# -- generators ---------------------------------------------------------------

def gen_star(n: int) -> Hypergraph:
    """n edges (0, i) through the shared center vertex 0; 2-partite."""
    if n < 1:
        raise BadParams("star needs n >= 1")
    return build(n + 1, [(0, i) for i in range(1, n + 1)], [0] + [1] * n)


def gen_disjoint(n: int) -> Hypergraph:
    """n pairwise disjoint edges (2i, 2i+1); 2-partite."""
    if n < 1:
        raise BadParams("disjoint fixture needs n >= 1")
    return build(2 * n, [(2 * i, 2 * i + 1) for i in range(n)], [0, 1] * n)


def gen_triangle() -> Hypergraph:
    return build(3, [(0, 1), (1, 2), (0, 2)])


def disjoint_union(*hs: Hypergraph) -> Hypergraph:
    """Vertex-disjoint union; keeps a partition only if every input has one with the same k."""
    edges = []
    partition = []
    offset = 0
    keep_partition = all(h.is_partite for h in hs) and len({h.num_parts for h in hs}) <= 1
    for h in hs:
        edges.extend(tuple(v + offset for v in e) for e in h.edges)
        if keep_partition:
            partition.extend(h.partition)
        offset += h.num_vertices
    return build(offset, edges, partition if keep_partition else None)


def gen_bipartite_ba(N: int, m: int, seed: int) -> Hypergraph:
    """Bipartite preferential-attachment graph with |V1| = |V2| = N.

    Starts from K_{m,m}. Each later step adds one vertex to each side; each new
    vertex draws m distinct old vertices on the opposite side with probability
    proportional to their degree at the start of the step.
    V1 is 0..N-1 (part 0), V2 is N..2N-1 (part 1).
    """
    if m < 1 or N < m:
        raise BadParams(f"need N >= m >= 1, got N={N}, m={m}")
    rng = np.random.default_rng(seed)
    deg1 = np.zeros(N)
    deg2 = np.zeros(N)
    deg1[:m] = m
    deg2[:m] = m
    edges = [(u, N + v) for u in range(m) for v in range(m)]
    for t in range(m, N):
        targets2 = rng.choice(t, size=m, replace=False, p=deg2[:t] / deg2[:t].sum())
        targets1 = rng.choice(t, size=m, replace=False, p=deg1[:t] / deg1[:t].sum())
        for v in targets2:
            edges.append((t, N + int(v)))
        for u in targets1:
            edges.append((int(u), N + t))
        deg1[t] += m
        deg2[targets2] += 1
        deg2[t] += m
        deg1[targets1] += 1
    return build(2 * N, edges, [0] * N + [1] * N)


def gen_bipartite_er(N: int, p: float, seed: int) -> Hypergraph:
    """Each of the N*N cross pairs is an edge independently with probability p."""
    if N < 0 or not 0.0 <= p <= 1.0:
        raise BadParams(f"need N >= 0 and 0 <= p <= 1, got N={N}, p={p}")
    rng = np.random.default_rng(seed)
    u, v = np.nonzero(rng.random((N, N)) < p)
    return build(2 * N, zip(u.tolist(), (v + N).tolist()), [0] * N + [1] * N)


def gen_u_statistic(n: int, r: int) -> Hypergraph:
    """One edge per ordered r-tuple of distinct vertices out of n."""
    if not 1 <= r <= n:
        raise BadParams(f"need n >= r >= 1, got n={n}, r={r}")
    return build(n, itertools.permutations(range(n), r))


def falling_factorial(n: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= n - i
    return out
