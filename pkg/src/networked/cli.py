"""Command-line entry point: ``networked <command> ...``.

Every command writes CSV (header row, 12 significant digits) or JSON to
``--out`` or stdout.  Failures exit with status 2 and one line on stderr:
``error: <Category>: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Iterable, Sequence

import numpy as np

from . import concentration as conc
from .decomposition import DiscreteKDist, anova_decompose, mask_parts
from .erm import METHODS, excess_risk_experiment, linear_spec, method_weights, part1_class, star_heavy_fixture
from .errors import BadParams, NetworkedError, ParseError
from .hypergraph import (
    Hypergraph,
    exact_matching,
    gen_bipartite_ba,
    gen_bipartite_er,
    gen_disjoint,
    gen_star,
    gen_triangle,
    gen_u_statistic,
    greedy_matching,
    max_degree,
)
from .simulate import ResponseSpec, estimate_tails
from .weighting import minimax_variance_weights, s_value

log = logging.getLogger("networked")

STOCHASTIC_GENERATORS = ("ba", "er")
SCHEMES = ("eqw", "ind", "svalue", "minimax")


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def emit(args, header: Sequence[str], rows: Iterable[Sequence], payload=None):
    """Write rows as CSV, or ``payload`` (default: list of row dicts) as JSON."""
    rows = list(rows)
    if args.format == "json":
        if payload is None:
            payload = [dict(zip(header, r)) for r in rows]
        text = json.dumps(payload, indent=2, default=_json_default) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])
        text = buf.getvalue()
    write_text(args.out, text)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_text(path: str | None, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


def read_hypergraph(path: str) -> Hypergraph:
    with open(path, encoding="utf-8") as f:
        return Hypergraph.from_json(f.read())


def require_seed(args):
    if args.seed is None:
        raise BadParams(f"--seed is required for '{args.command}'")


def parse_json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{what} is not valid JSON: {e}") from None


# -- fixtures ---------------------------------------------------------------------

def parse_fixture(text: str, seed: int | None) -> Hypergraph:
    """``star:N``, ``disjoint:N``, ``triangle``, ``ba:N:m``, ``er:N:p``, ``ustat:n:r`` or a JSON file path."""
    name, *rest = text.split(":")
    try:
        if name == "star":
            return gen_star(int(rest[0]))
        if name == "disjoint":
            return gen_disjoint(int(rest[0]))
        if name == "triangle":
            return gen_triangle()
        if name == "ustat":
            return gen_u_statistic(int(rest[0]), int(rest[1]))
        if name in STOCHASTIC_GENERATORS:
            if seed is None:
                raise BadParams(f"fixture {name} needs --seed")
            if name == "ba":
                return gen_bipartite_ba(int(rest[0]), int(rest[1]), seed)
            return gen_bipartite_er(int(rest[0]), float(rest[1]), seed)
    except (IndexError, ValueError) as e:
        if isinstance(e, NetworkedError):
            raise
        raise ParseError(f"bad fixture {text!r}") from None
    try:
        return read_hypergraph(text)
    except FileNotFoundError:
        raise ParseError(f"unknown fixture or missing file {text!r}") from None


def fixture_spec(h: Hypergraph, response: str, noise: float) -> ResponseSpec:
    """Uniform +-1 features with a response read from the edge's features."""
    if h.is_partite:
        return ResponseSpec.rademacher(h.num_parts, response, noise)
    sizes = {len(e) for e in h.edges}
    if len(sizes) != 1:
        raise BadParams("non-partite fixtures need edges of one size")
    r = sizes.pop()
    part = ResponseSpec.rademacher(r, response, noise)
    return ResponseSpec.iid_vertices([0.5, 0.5], part.table, noise)


# -- commands ---------------------------------------------------------------------

def cmd_gen(args):
    kind = args.kind
    if kind in STOCHASTIC_GENERATORS:
        require_seed(args)
    if kind == "star":
        h = gen_star(args.n)
    elif kind == "disjoint":
        h = gen_disjoint(args.n)
    elif kind == "triangle":
        h = gen_triangle()
    elif kind == "ustat":
        h = gen_u_statistic(args.n, args.r)
    elif kind == "ba":
        h = gen_bipartite_ba(args.N, args.m, args.seed)
    else:
        h = gen_bipartite_er(args.N, args.p, args.seed)
    write_text(args.out, h.to_json() + "\n")
    log.info("generated %d vertices, %d edges", h.num_vertices, h.num_edges)


def weight_summary(h: Hypergraph) -> dict:
    n = h.num_edges
    omega = max_degree(h)
    match = exact_matching(h) if n <= 20 else greedy_matching(h)
    return {
        "n": n,
        "omega": omega,
        "n_over_omega": n / omega if omega else 0.0,
        "s": s_value(h).s,
        "matching": len(match),
        "matching_exact": n <= 20,
    }


def cmd_weight(args):
    h = read_hypergraph(args.graph)
    if args.scheme == "minimax":
        w = minimax_variance_weights(h).unnormalized()
    else:
        w = method_weights(h, args.scheme).weights
    summary = weight_summary(h)
    rows = [(i, float(x)) for i, x in enumerate(w)]
    emit(args, ("edge", "weight"), rows, payload={"scheme": args.scheme, "weights": w, "summary": summary})
    sys.stderr.write("s={s:.12g} n={n} omega={omega} n/omega={n_over_omega:.12g} matching={matching}\n".format(**summary))


def cmd_svalue_scaling(args):
    require_seed(args)
    if len(args.N) < 2:
        raise BadParams("give at least 2 sizes with --N")
    if args.seeds < 3:
        raise BadParams("--seeds must be at least 3")
    if args.model == "ba":
        if args.m is None:
            raise BadParams("model ba needs --m")
    elif args.pN is None:
        raise BadParams("model er needs --pN")
    rows = []
    for N in args.N:
        ratios = []
        for j in range(args.seeds):
            seed = args.seed + j
            if args.model == "ba":
                h = gen_bipartite_ba(N, args.m, seed)
            else:
                h = gen_bipartite_er(N, args.pN / N, seed)
            ratios.append(s_value(h).s / N)
        r = np.array(ratios)
        rows.append((N, float(r.mean()), float(r.std(ddof=1)), args.seeds))
    emit(args, ("N", "mean_s_over_N", "sd_s_over_N", "seeds"), rows)


BOUND_KINDS = (
    "bennett", "bennett_h", "bernstein", "hoeffding", "janson", "eqw", "u_statistic",
    "sample_error_iid", "sample_error_eqw_chromatic", "sample_error_eqw_omega", "sample_error_s_value",
)


def bound_rows(q: conc.BoundQuery, kinds: Sequence[str], strict: bool):
    out = []
    for kind in kinds:
        try:
            if kind == "bennett":
                res = [conc.networked_bennett(q)]
            elif kind == "bennett_h":
                res = [conc.networked_bennett_h(q)]
            elif kind == "bernstein":
                res = [conc.networked_bernstein(q)]
            elif kind == "hoeffding":
                res = [conc.networked_hoeffding(q)]
            elif kind == "janson":
                res = list(conc.janson_bounds(q))
            elif kind == "eqw":
                res = list(conc.eqw_bounds(q))
            elif kind == "u_statistic":
                res = list(conc.u_statistic_bounds(q))
            elif kind.startswith("sample_error_"):
                res = [conc.sample_error_bound(kind[len("sample_error_"):], q)]
            else:
                raise BadParams(f"unknown bound kind {kind!r}")
        except BadParams:
            if strict:
                raise
            continue  # inputs for this bound were not supplied
        out.extend(res)
    return out


def cmd_bounds(args):
    kinds = args.kind or BOUND_KINDS
    rows = []
    for eps in args.epsilon:
        q = conc.BoundQuery(
            epsilon=eps, M=args.M, sigma2=args.sigma2, total_weight=args.total_weight, n=args.n,
            omega=args.omega, chi_star=args.chi_star, r=args.r, range_width=args.range_width,
            covering=args.covering,
        )
        for b in bound_rows(q, kinds, strict=bool(args.kind)):
            rows.append((b.kind, eps, b.raw, b.value))
    if not rows:
        raise BadParams("no bound could be evaluated from the given inputs")
    emit(args, ("kind", "epsilon", "value_raw", "value_clipped"), rows)


def cmd_simulate(args):
    require_seed(args)
    h = parse_fixture(args.fixture, args.seed)
    spec = fixture_spec(h, args.response, args.noise)
    rows = []
    for scheme in args.scheme:
        w = method_weights(h, scheme)
        tails = estimate_tails(h, spec, w, args.epsilon, args.trials, args.seed, workers=args.workers)
        for t in tails:
            q = conc.BoundQuery(epsilon=t.epsilon, M=spec.M, sigma2=spec.variance, total_weight=w.total)
            bennett = conc.networked_bennett(q).value if spec.variance > 0 else 1.0
            rows.append((args.fixture, scheme, t.epsilon, t.estimate, t.se,
                         conc.networked_hoeffding(q).value, conc.networked_bernstein(q).value, bennett))
    emit(args, ("fixture", "scheme", "epsilon", "empirical", "se", "bound_hoeffding", "bound_bernstein",
                "bound_bennett"), rows)


def cmd_variance(args):
    table = np.asarray(parse_json_arg(args.table, "--table"), dtype=float)
    if args.marginals:
        margs = parse_json_arg(args.marginals, "--marginals")
        d = DiscreteKDist(tuple(np.asarray(m, dtype=float) for m in margs))
    else:
        d = DiscreteKDist.uniform(table.shape)
    dec = anova_decompose(table, d)
    rows = []
    for mask in range(1 << dec.k):
        parts = mask_parts(mask, dec.k)
        rows.append((mask, "|".join(map(str, parts)) or "none", dec.variances[mask]))
    rows.append(("total", "all", dec.total_variance))
    emit(args, ("mask", "parts", "variance"), rows)


def cmd_erm(args):
    require_seed(args)
    h = star_heavy_fixture(args.size) if args.fixture == "star-heavy" else parse_fixture(args.fixture, args.seed)
    spec = linear_spec(args.a, args.b, args.noise)
    cls = part1_class(spec)
    res = excess_risk_experiment(h, spec, cls, args.methods, args.repetitions, args.seed)
    rows = [(r.method, r.repetition, r.selected_index, r.empirical_risk, r.excess_risk) for r in res.records]
    payload = None
    if args.format == "json":
        payload = {
            "optimum_index": res.optimum_index,
            "optimum_risk": res.optimum_risk,
            "summaries": {m: s.__dict__ for m, s in res.summaries.items()},
            "records": [r.__dict__ for r in res.records],
        }
    emit(args, ("method", "repetition", "selected_index", "empirical_risk", "excess_risk"), rows, payload)
    for m, s in res.summaries.items():
        log.info("%s: mean excess %.6g (se %.3g), |w| = %.6g", m, s.mean, s.se, s.total_weight)


# -- argument parsing ---------------------------------------------------------------

def positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (required by stochastic commands)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="networked", description="Learning from networked examples.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a hypergraph as JSON")
    g.add_argument("kind", choices=("star", "disjoint", "triangle", "ba", "er", "ustat"))
    g.add_argument("--n", type=int, default=5, help="edges (star, disjoint) or variables (ustat)")
    g.add_argument("--r", type=int, default=2, help="U-statistic order")
    g.add_argument("--N", type=int, default=100, help="vertices per side (ba, er)")
    g.add_argument("--m", type=int, default=2, help="attachment count (ba)")
    g.add_argument("--p", type=float, default=0.02, help="edge probability (er)")
    g.set_defaults(func=cmd_gen)

    w = sub.add_parser("weight", parents=[common], help="weight the edges of a hypergraph file")
    w.add_argument("graph")
    w.add_argument("--scheme", choices=SCHEMES, default="svalue")
    w.set_defaults(func=cmd_weight)

    s = sub.add_parser("svalue-scaling", parents=[common], help="mean s/N over random graphs")
    s.add_argument("--model", choices=("ba", "er"), required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--pN", type=float, help="expected degree p*N (er)")
    s.add_argument("--N", type=int, nargs="+", default=[100, 200, 300, 400, 500])
    s.add_argument("--seeds", type=int, default=10, help="graphs per size; seeds are seed, seed+1, ...")
    s.set_defaults(func=cmd_svalue_scaling)

    b = sub.add_parser("bounds", parents=[common], help="evaluate tail bounds")
    b.add_argument("--epsilon", type=positive_float, nargs="+", required=True)
    b.add_argument("--M", type=float)
    b.add_argument("--sigma2", type=float)
    b.add_argument("--total-weight", type=float)
    b.add_argument("--n", type=int)
    b.add_argument("--omega", type=float)
    b.add_argument("--chi-star", type=float)
    b.add_argument("--r", type=int)
    b.add_argument("--range-width", type=float, help="kernel range b - a (U statistics)")
    b.add_argument("--covering", type=float, default=1.0)
    b.add_argument("--kind", nargs="+", choices=BOUND_KINDS,
                   help="bounds to evaluate (default: every bound the inputs allow)")
    b.set_defaults(func=cmd_bounds)

    m = sub.add_parser("simulate", parents=[common], help="Monte Carlo tails against the bounds")
    m.add_argument("--fixture", required=True, help="star:N, disjoint:N, triangle, ba:N:m, er:N:p, ustat:n:r or a file")
    m.add_argument("--response", choices=("first", "mean", "product"), default="first")
    m.add_argument("--noise", type=float, default=0.0)
    m.add_argument("--scheme", nargs="+", choices=("eqw", "ind", "svalue"), default=["svalue"])
    m.add_argument("--epsilon", type=positive_float, nargs="+", default=[0.1, 0.3, 0.5])
    m.add_argument("--trials", type=int, default=100_000)
    m.add_argument("--workers", type=int, default=1)
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("variance", parents=[common], help="ANOVA component variances of a table")
    v.add_argument("--table", required=True, help="response table as a JSON nested array")
    v.add_argument("--marginals", help="per-part marginals as JSON (default uniform)")
    v.set_defaults(func=cmd_variance)

    e = sub.add_parser("erm", parents=[common], help="excess risk of weighted ERM")
    e.add_argument("--fixture", default="star-heavy")
    e.add_argument("--size", type=int, default=20, help="star and disjoint size of the star-heavy fixture")
    e.add_argument("--a", type=float, default=1.0, help="response weight of the part-0 feature")
    e.add_argument("--b", type=float, default=0.5, help="response weight of the part-1 feature")
    e.add_argument("--noise", type=float, default=0.5)
    e.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    e.add_argument("--repetitions", type=int, default=200)
    e.set_defaults(func=cmd_erm)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except NetworkedError as e:
        sys.stderr.write(f"error: {e.category}: {e}\n")
        return 2
    except OSError as e:
        sys.stderr.write(f"error: IoError: {e}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
