import json
import pathlib

import numpy as np
import pytest

from networked.hypergraph import (
    build,
    disjoint_union,
    gen_bipartite_ba,
    gen_bipartite_er,
    gen_disjoint,
    gen_star,
    gen_triangle,
    gen_u_statistic,
)

from networked.lp import LpProblem

FROZEN = json.loads((pathlib.Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def frozen():
    return FROZEN


def path3():
    """Three edges in a 2-partite path: a0-b0, a1-b0, a1-b1."""
    return build(4, [(0, 2), (1, 2), (1, 3)], [0, 0, 1, 1])


def random_partite(rng, k=2, part_size=3, n_edges=5):
    """Random k-partite hypergraph with distinct edges."""
    seen = set()
    assert n_edges <= part_size ** k
    while len(seen) < n_edges:
        seen.add(tuple(int(l * part_size + rng.integers(part_size)) for l in range(k)))
    edges = sorted(seen)
    return build(k * part_size, edges, [l for l in range(k) for _ in range(part_size)])


def small_fixtures():
    """Named fixtures with at most 20 edges."""
    out = {
        "star5": gen_star(5),
        "star10": gen_star(10),
        "triangle": gen_triangle(),
        "disjoint4": gen_disjoint(4),
        "disjoint10": gen_disjoint(10),
        "path3": path3(),
        "star3+disjoint2": disjoint_union(gen_star(3), gen_disjoint(2)),
        "ustat4_2": gen_u_statistic(4, 2),
        "ustat5_2": gen_u_statistic(5, 2),
        "k33": gen_bipartite_ba(3, 3, 0),
        "ba6_2": gen_bipartite_ba(6, 2, 3),
        "er8": gen_bipartite_er(8, 0.25, 2),
    }
    rng = np.random.default_rng(123)
    for i in range(6):
        out[f"rand{i}"] = random_partite(rng, k=2 + i % 2, part_size=4 - i % 2, n_edges=4 + 2 * i)
    return out


def lp_corpus():
    """Small LPs with bounded optima, including degenerate and negative-rhs rows."""
    out = [
        LpProblem([1, 1], [[1, 2], [3, 1]], [4, 6]),
        LpProblem([3, 2], [[1, 1], [1, 0], [0, 1]], [4, 3, 3]),
        LpProblem([1, 1, 1], [[1, 1, 0], [0, 1, 1], [1, 0, 1]], [1, 1, 1]),  # triangle matching LP
        LpProblem([1, 0], [[1, 1], [-1, -1]], [2, -1]),  # x + y >= 1
        LpProblem([-1, -1], [[-1, -2], [-3, -1]], [-2, -3]),  # minimization with >= rows
        LpProblem([1], [[1], [2]], [1, 2]),  # degenerate: both rows tight
        LpProblem([2, 1, 0], [[1, 1, 1], [1, 0, 0], [0, 0, -1]], [3, 2, -0.5]),
    ]
    rng = np.random.default_rng(5)
    for _ in range(40):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, 5))
        A = rng.integers(-2, 4, size=(m, n)).astype(float)
        b = rng.integers(-1, 6, size=m).astype(float)
        A = np.vstack([A, np.ones((1, n))])  # keep it bounded
        b = np.append(b, 5.0)
        out.append(LpProblem(rng.integers(-3, 4, size=n).astype(float), A, b))
    return out


# -- acceptance report ---------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def record(number: int, title: str, ok: bool, detail: str):
    """Store a criterion verdict (printed in the terminal summary) and fail the test if it did not hold."""
    ACCEPTANCE[number] = (bool(ok), title, detail)
    assert ok, f"criterion {number} ({title}) failed: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
