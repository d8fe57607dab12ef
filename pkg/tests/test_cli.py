import io
import json
from importlib import resources
from pathlib import Path

import pytest

from orbitrel import cli
from orbitrel.valued_field import FieldSpec

ROOT = Path(__file__).resolve().parent.parent
EXAMPLES = ROOT / "docs" / "examples"
SHIPPED = [("classify", "torus_m1"), ("classify", "iterational_m2"),
           ("linearize", "mobius_linearize")]


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj), encoding="utf-8")
    return p


def example(name):
    return json.loads((EXAMPLES / f"{name}.problem.json").read_text(encoding="utf-8"))


@pytest.mark.parametrize("cmd,name", SHIPPED)
def test_shipped_reports_are_reproduced(cmd, name):
    code, out, _ = invoke(cmd, EXAMPLES / f"{name}.problem.json", "--json")
    assert code == 0
    assert out.encode("utf-8") == (EXAMPLES / f"{name}.report.json").read_bytes()


def test_docs_schemas_match_the_package():
    for path in (ROOT / "docs" / "schemas").glob("*.schema.json"):
        pkg = resources.files("orbitrel").joinpath("schemas").joinpath(path.name).read_text()
        assert json.loads(pkg) == json.loads(path.read_text())


def test_classify_text_output():
    code, out, _ = invoke("classify", EXAMPLES / "torus_m1.problem.json")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("system: M = 1")
    assert "family 1 (deformed torus, box-verified, 6 points in box):" in lines
    assert "  lattice: [1 -2] · (s - (2,0)) = 0" in lines


def test_classify_verbose_reports_xi(tmp_path):
    code, _, err = invoke("classify", EXAMPLES / "torus_m1.problem.json", "-v")
    assert code == 0
    assert "xi = h(f^t(a))" in err


def test_no_relations_message(tmp_path):
    obj = example("torus_m1")
    # x1 + x2 never vanishes: both orbit points have positive leading coefficient
    obj["poly"]["terms"][1]["coeff"] = "1"
    code, out, _ = invoke("classify", write(tmp_path, "p.json", obj), "--box", "5")
    assert code == 0
    assert "no relations on orbit (within verified box)" in out


def test_oracle_and_dominant():
    code, out, _ = invoke("oracle", EXAMPLES / "torus_m1.problem.json", "--box", "6")
    assert code == 0
    assert out.splitlines() == ["(2,0)", "(4,1)", "(6,2)"]
    code, out, _ = invoke("dominant", EXAMPLES / "torus_m1.problem.json", "--json")
    assert code == 0
    assert {tuple(d["exp"]) for d in json.loads(out)["dominant"]} == {("1", "0"), ("0", "2")}


def test_orbit_command():
    code, out, _ = invoke("orbit", EXAMPLES / "torus_m1.problem.json", "--tmax", "3")
    assert code == 0
    assert out.splitlines()[1:] == ["0\t2", "1\t3", "2\t4", "3\t5"]


def test_mann_solve_flags_and_file(tmp_path):
    code, out, _ = invoke("mann-solve", "--coeffs", "1,-1", "--base", "2", "--rhs", "4")
    assert (code, out) == (0, "point (3,2)\n")
    p = write(tmp_path, "m.json", {"coeffs": ["1", "-1"], "base": "3", "rhs": "0"})
    code, out, _ = invoke("mann-solve", p, "--box", "4")
    assert code == 0 and out.startswith("family: t2 = t1 + 0")
    code, out, _ = invoke("mann-solve", "--coeffs", "1,1", "--base", "2", "--rhs", "0")
    assert out == "no solutions\n"


def test_trunc_precedence(tmp_path, monkeypatch):
    obj = example("mobius_linearize")
    del obj["trunc"]
    p = write(tmp_path, "p.json", obj)
    monkeypatch.setenv("ORBITREL_TRUNC", "5")
    code, out, _ = invoke("linearize", p, "--json")
    assert code == 0 and json.loads(out)["h"]["trunc"] == "5"
    code, out, _ = invoke("linearize", p, "--json", "--trunc", "7")
    assert json.loads(out)["h"]["trunc"] == "7"
    monkeypatch.setenv("ORBITREL_TRUNC", "many")
    assert invoke("linearize", p)[0] == cli.EXIT_SCHEMA


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert invoke("classify", bad)[0] == cli.EXIT_SCHEMA
    assert invoke("classify", tmp_path / "missing.json")[0] == cli.EXIT_SCHEMA
    obj = example("torus_m1")
    del obj["map"]
    assert invoke("classify", write(tmp_path, "s.json", obj))[0] == cli.EXIT_SCHEMA

    obj = example("torus_m1")
    obj["a"] = "0"
    code, _, err = invoke("classify", write(tmp_path, "d.json", obj))
    assert code == cli.EXIT_DOMAIN and "domain violation" in err

    # an inexact map over a small cap cannot reach the requested order
    Q5 = FieldSpec.padic(5, 20)
    lam = Q5.from_digits(1, [1, 2], prec=19)
    from orbitrel.series import TruncatedSeries
    f = TruncatedSeries.from_terms(Q5, {1: lam, 2: 1}, 32)
    obj = {"field": Q5.to_json(), "map": f.to_json(), "a": "25", "trunc": "32"}
    code, _, err = invoke("linearize", write(tmp_path, "e.json", obj))
    assert code == cli.EXIT_PRECISION and "precision exhausted" in err

    assert invoke("mann-solve")[0] == cli.EXIT_SCHEMA
    assert invoke("no-such-command")[0] == cli.EXIT_SCHEMA
