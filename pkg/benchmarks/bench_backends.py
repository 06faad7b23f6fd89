"""Compiled kernels vs the numpy fallback.

    python3 benchmarks/bench_backends.py [--N 300] [--trials 200000] [--repeat 3]

Times the simplex on the s-value LP of bipartite preferential-attachment
graphs and the Monte Carlo trial-sum kernel, and checks that both backends
agree (LP values to 1e-9, trial sums bitwise).
"""

import argparse
import time

import numpy as np

from networked import _backend
from networked.hypergraph import gen_bipartite_ba
from networked.simulate import ResponseSpec, weighted_sums
from networked.weighting import eqw_weights, s_value


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=300)
    ap.add_argument("--m", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if _backend.compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")

    print(f"{'kernel':<28}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}  agree")
    for m in args.m:
        h = gen_bipartite_ba(args.N, m, seed=1)
        tp, rp = best_of(lambda: s_value(h, backend="python").s, args.repeat)
        tc, rc = best_of(lambda: s_value(h, backend="compiled").s, args.repeat)
        label = f"simplex BA N={args.N} m={m}"
        print(f"{label:<28}{tp:>12.3f}{tc:>14.3f}{tp / tc:>9.1f}x  {abs(rp - rc) < 1e-9}")

    h = gen_bipartite_ba(args.N, 2, seed=1)
    spec = ResponseSpec.rademacher(2, "mean", noise=0.5)
    w = eqw_weights(h)
    tp, sp = best_of(lambda: weighted_sums(h, spec, w, args.trials, 7, backend="python"), args.repeat)
    tc, sc = best_of(lambda: weighted_sums(h, spec, w, args.trials, 7, backend="compiled"), args.repeat)
    label = f"trial sums x{args.trials}"
    print(f"{label:<28}{tp:>12.3f}{tc:>14.3f}{tp / tc:>9.1f}x  {bool(np.array_equal(sp, sc))}")


if __name__ == "__main__":
    main()
