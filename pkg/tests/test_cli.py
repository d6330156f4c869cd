import json

import numpy as np
import pytest

from starweyl import cli, expr


@pytest.fixture
def cfg_file(tmp_path):
    def write(text):
        p = tmp_path / "cfg.yaml"
        p.write_text(text)
        return str(p)
    return write


def test_list_scenarios(capsys):
    assert cli.main(["list-scenarios"]) == 0
    names = capsys.readouterr().out.split()
    assert "core-identities" in names and "berezin-suite" in names


def test_unknown_scenario(tmp_path):
    assert cli.main(["run", "nope", "--out", str(tmp_path)]) == cli.EXIT_UNKNOWN_SCENARIO


@pytest.mark.parametrize("text", ["version: 2\n", "hbar: -1\n", "K: {kind: diagonal}\n", "[1, 2]\n", "a: [\n"])
def test_bad_config(tmp_path, cfg_file, text):
    assert cli.main(["run", "two-inverses", "--config", cfg_file(text), "--out", str(tmp_path)]) == cli.EXIT_BAD_CONFIG


def test_missing_config_file(tmp_path):
    assert cli.main(["run", "two-inverses", "--config", str(tmp_path / "absent.yaml")]) == cli.EXIT_BAD_CONFIG


def test_bad_thread_count(tmp_path, monkeypatch):
    monkeypatch.setenv("STARWEYL_THREADS", "many")
    assert cli.main(["run", "two-inverses", "--out", str(tmp_path)]) == cli.EXIT_BAD_CONFIG


@pytest.mark.parametrize("scenario", ["two-inverses", "berezin-suite", "fock-embedding"])
def test_scenario_outputs_are_deterministic(tmp_path, monkeypatch, scenario):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", scenario, "--out", str(a)]) == 0
    monkeypatch.setenv("STARWEYL_THREADS", "3")
    assert cli.main(["run", scenario, "--out", str(b)]) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes(), f
    report = json.loads((a / ("%s.json" % scenario)).read_text())
    assert report["passed"] and report["schema_version"] == 1


def test_failing_criterion_exits_one(tmp_path, cfg_file):
    cfg = cfg_file("version: 1\nn_K: 1\ns_values: [0.4]\n")
    assert cli.main(["run", "vacuum-suite", "--config", cfg, "--out", str(tmp_path)]) == cli.EXIT_ASSERTION


def test_eval_exact_commutator(tmp_path):
    rep = cli.eval_expression("comm(u1, v1)", {"hbar": 1.0}, tmp_path)
    assert rep["result"]["kind"] == "exact"
    (row,) = rep["result"]["element"]["terms"]
    assert row["idx"] == [0, 0]
    assert row["coeff"] == [{"hpow": 1, "re_num": 0, "re_den": 1, "im_num": -1, "im_den": 1}]
    header = (tmp_path / "eval_grid.csv").read_text().splitlines()[0]
    assert header == "x0_re,x0_im,y0_re,y0_im,re,im"


def test_eval_exponential_on_vacuum():
    rep = cli.eval_expression("expstar(-2*y0) * vacuum", {}, None)
    assert rep["equals_named"]["vacuum"]
    rep = cli.eval_expression("vacuum * vacuum", {"K": {"kind": "random-generic", "seed": 1}}, None)
    assert rep["equals_named"]["vacuum"] and not rep["equals_named"]["bar_vacuum"]


@pytest.mark.parametrize("q", ["x0*y0", "x0*x0 + y0*y0"])
def test_eval_quadratic_exponential_group_law(q):
    ev = expr.Evaluator(1, 0.8, K_numeric=np.array([[0.2j, 0.1], [0.1, -0.3j]]))
    pts = ev.ctx.grid()
    a = ev("expstar(0.1*(%s)) * expstar(0.2*(%s))" % (q, q)).evaluate(pts)
    b = ev("expstar(0.3*(%s))" % q).evaluate(pts)
    assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(b))


@pytest.mark.parametrize("text,code", [("u1 +", cli.EXIT_PARSE), ("foo(u1)", cli.EXIT_PARSE),
                                       ("u1 ** -1", cli.EXIT_PARSE), ("u1 / v1", cli.EXIT_PARSE),
                                       ("expstar(u1*u1*u1)", cli.EXIT_UNSUPPORTED),
                                       ("expstar(x0*x0)", cli.EXIT_UNSUPPORTED)])
def test_eval_errors(text, code):
    assert cli.main(["eval", text]) == code


def test_parse_error_position():
    with pytest.raises(expr.ParseError) as e:
        expr.Evaluator(1, 1.0, K_exact=None)("u1 + bogus")
    assert e.value.position == 5


def test_required_m():
    assert expr.required_m("u3 * v1") == 3
    assert expr.required_m("x1 + y0") == 2
