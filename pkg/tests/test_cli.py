import csv
import io
import json

import pytest

from networked.cli import main
from networked.hypergraph import Hypergraph, max_degree


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestGen:
    def test_star(self, capsys, tmp_path):
        f = tmp_path / "s.json"
        assert run(capsys, "gen", "star", "--n", "5", "--out", str(f))[0] == 0
        h = Hypergraph.from_json(f.read_text())
        assert h.num_edges == 5 and all(e[0] == 0 for e in h.edges)

    def test_ba_count(self, capsys):
        code, out, _ = run(capsys, "gen", "ba", "--N", "100", "--m", "2", "--seed", "7")
        assert code == 0 and len(json.loads(out)["edges"]) == 396

    def test_er_empty(self, capsys):
        code, out, _ = run(capsys, "gen", "er", "--N", "10", "--p", "0", "--seed", "1")
        assert json.loads(out)["edges"] == []

    def test_seed_required(self, capsys):
        code, _, err = run(capsys, "gen", "ba", "--N", "10")
        assert code == 2 and err.startswith("error: BadParams:")

    def test_bad_params(self, capsys):
        code, _, err = run(capsys, "gen", "ba", "--N", "1", "--m", "2", "--seed", "1")
        assert code == 2 and err.startswith("error: BadParams:")


class TestWeight:
    def test_triangle_svalue(self, capsys, tmp_path):
        f = tmp_path / "t.json"
        run(capsys, "gen", "triangle", "--out", str(f))
        code, out, err = run(capsys, "weight", str(f), "--scheme", "svalue", "--format", "json")
        d = json.loads(out)
        assert d["summary"]["s"] == pytest.approx(1.5)
        assert "s=1.5" in err

    def test_star_eqw(self, capsys, tmp_path):
        f = tmp_path / "s.json"
        run(capsys, "gen", "star", "--n", "5", "--out", str(f))
        _, out, _ = run(capsys, "weight", str(f), "--scheme", "eqw")
        assert [float(r["weight"]) for r in rows(out)] == [0.2] * 5

    def test_disjoint_ind(self, capsys, tmp_path):
        f = tmp_path / "d.json"
        run(capsys, "gen", "disjoint", "--n", "4", "--out", str(f))
        _, out, _ = run(capsys, "weight", str(f), "--scheme", "ind")
        assert [float(r["weight"]) for r in rows(out)] == [1.0] * 4

    def test_roundtrip_and_chain(self, capsys, tmp_path):
        f = tmp_path / "ba.json"
        run(capsys, "gen", "ba", "--N", "30", "--m", "2", "--seed", "3", "--out", str(f))
        h = Hypergraph.from_json(f.read_text())
        _, out, _ = run(capsys, "weight", str(f), "--format", "json")
        s = json.loads(out)["summary"]
        assert s["n"] == h.num_edges and s["omega"] == max_degree(h)
        assert s["s"] >= max(s["matching"], s["n_over_omega"]) - 1e-9

    def test_minimax(self, capsys, tmp_path):
        f = tmp_path / "d.json"
        run(capsys, "gen", "disjoint", "--n", "3", "--out", str(f))
        code, out, _ = run(capsys, "weight", str(f), "--scheme", "minimax")
        assert code == 0 and len(rows(out)) == 3

    def test_parse_error(self, capsys, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text("{")
        code, _, err = run(capsys, "weight", str(f))
        assert code == 2 and err.startswith("error: ParseError:")

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "weight", "/nonexistent/x.json")
        assert code == 2 and err.startswith("error: IoError:")


class TestOthers:
    def test_bounds(self, capsys):
        _, out, _ = run(capsys, "bounds", "--epsilon", "1", "--total-weight", "2", "--M", "1", "--sigma2", "1")
        r = {x["kind"]: x for x in rows(out)}
        assert float(r["hoeffding"]["value_clipped"]) == pytest.approx(0.3679, abs=1e-4)
        assert float(r["bennett"]["value_clipped"]) == pytest.approx(0.5)
        assert list(rows(out)[0]) == ["kind", "epsilon", "value_raw", "value_clipped"]

    def test_bounds_explicit_missing_input(self, capsys):
        code, _, err = run(capsys, "bounds", "--epsilon", "1", "--kind", "janson", "--n", "3", "--M", "1")
        assert code == 2 and err.startswith("error: MissingChiStar:")

    def test_simulate(self, capsys):
        _, out, _ = run(capsys, "simulate", "--fixture", "disjoint:10", "--epsilon", "0.6", "--trials",
                        "1000000", "--seed", "1", "--scheme", "ind")
        r = rows(out)[0]
        assert abs(float(r["empirical"]) - 56 / 1024) < 3 * float(r["se"])
        assert list(r) == ["fixture", "scheme", "epsilon", "empirical", "se", "bound_hoeffding",
                           "bound_bernstein", "bound_bennett"]

    def test_simulate_triangle(self, capsys):
        code, out, _ = run(capsys, "simulate", "--fixture", "triangle", "--response", "product", "--trials",
                           "20000", "--seed", "2")
        assert code == 0 and len(rows(out)) == 3

    def test_simulate_byte_identical(self, capsys):
        args = ("simulate", "--fixture", "ba:30:2", "--trials", "70000", "--seed", "4", "--scheme", "eqw", "svalue")
        _, a, _ = run(capsys, *args)
        _, b, _ = run(capsys, *args, "--workers", "3")
        assert a == b

    def test_variance_xor(self, capsys):
        _, out, _ = run(capsys, "variance", "--table", "[[1,-1],[-1,1]]")
        r = {x["parts"]: float(x["variance"]) for x in rows(out)}
        assert r["0|1"] == pytest.approx(1.0) and r["0"] == 0 and r["1"] == 0

    def test_variance_bad_json(self, capsys):
        code, _, err = run(capsys, "variance", "--table", "[[1,")
        assert code == 2 and err.startswith("error: ParseError:")

    def test_svalue_scaling(self, capsys):
        _, out, _ = run(capsys, "svalue-scaling", "--model", "ba", "--m", "4", "--N", "30", "40", "--seeds",
                        "3", "--seed", "0")
        assert all(float(r["mean_s_over_N"]) > 0.95 for r in rows(out))

    def test_svalue_scaling_needs_seeds(self, capsys):
        code, _, err = run(capsys, "svalue-scaling", "--model", "er", "--pN", "2", "--N", "30", "40",
                           "--seeds", "2", "--seed", "0")
        assert code == 2

    def test_erm(self, capsys):
        args = ("erm", "--seed", "1", "--repetitions", "4", "--size", "5")
        _, a, _ = run(capsys, *args)
        _, b, _ = run(capsys, *args)
        assert a == b
        r = rows(a)
        assert len(r) == 12
        assert list(r[0]) == ["method", "repetition", "selected_index", "empirical_risk", "excess_risk"]

    def test_erm_json(self, capsys):
        _, out, _ = run(capsys, "erm", "--seed", "1", "--repetitions", "3", "--format", "json")
        d = json.loads(out)
        assert set(d["summaries"]) == {"eqw", "ind", "svalue"}
