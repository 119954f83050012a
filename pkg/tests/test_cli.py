import csv
import json
from fractions import Fraction

import pytest

from hotelling import cli, equilibrium
from hotelling.cli import main
from hotelling.core import parse_profile

from conftest import COUNTEREXAMPLE

CE = ",".join(COUNTEREXAMPLE)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    report = json.loads(out)
    assert report["schema"] == "v1"
    return code, report


def test_eval_counterexample(capsys):
    code, report = run_json(capsys, "eval", CE)
    assert code == 0
    assert report["command"] == "eval"
    (res,) = report["results"]
    assert res["payoffs"] == ["1/10", "1/10", "3/20", "3/20", "3/20", "3/20", "1/10", "1/10"]
    assert res["input"] == COUNTEREXAMPLE


@pytest.mark.parametrize("text, expected", [
    ("1/2,1/2", ["1/2", "1/2"]),
    ("0.25,0.25,0.75,0.75", ["1/4", "1/4", "1/4", "1/4"]),
])
def test_eval_examples(capsys, text, expected):
    code, report = run_json(capsys, "eval", text)
    assert code == 0
    assert report["results"][0]["payoffs"] == expected


def test_eval_input_round_trips(capsys):
    text = "1/3,0.5,2/7,1"
    _, report = run_json(capsys, "eval", text)
    echoed = report["results"][0]["input"]
    assert parse_profile(",".join(echoed)) == parse_profile(text)


def test_eval_oracle(capsys):
    code, report = run_json(capsys, "eval", CE, "--oracle", "1000")
    assert code == 0
    oracle = report["results"][0]["oracle"]
    assert oracle["cells"] == 1000
    assert Fraction(oracle["max_discrepancy"]) <= Fraction(oracle["bound"]) == Fraction(8, 1000)
    code, out, _ = run(capsys, "eval", CE, "--oracle", "1000")
    assert "max discrepancy" in out


def test_eval_text_output_is_exact(capsys):
    code, out, _ = run(capsys, "eval", "1/3,2/3")
    assert code == 0
    assert "f_1 = 1/2" in out
    assert "." not in out.replace("...", "")


def test_parse_failure_names_the_token(capsys):
    code, _, err = run(capsys, "eval", "1/4,1/x,3/4")
    assert code == 64
    assert "1/x" in err


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    [],
    ["eval", "1/2,1/2", "--oracle", "many"],
    ["eval", "1/2,1/2", "--oracle", "0"],
    ["eval"],
    ["eval", "1/2,3/2"],
    ["synth"],
    ["dynamics", "1/2,1/2"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 64


def test_max_denominator_env(capsys, monkeypatch):
    monkeypatch.setenv("HOTELLING_MAX_DENOM", "100")
    assert run(capsys, "eval", "1/100,1/2")[0] == 0
    assert run(capsys, "eval", "1/101,1/2")[0] == 64
    monkeypatch.setenv("HOTELLING_MAX_DENOM", "lots")
    assert run(capsys, "eval", "1/2,1/2")[0] == 64


def test_verify_two_vendors(capsys):
    code, report = run_json(capsys, "verify", "1/2,1/2")
    assert code == 0
    (res,) = report["results"]
    assert res["agree"] is True


def test_verify_three_vendors_cites_the_branch(capsys):
    code, out, _ = run(capsys, "verify", "1/4,2/4,3/4")
    assert code == 1
    assert "main4.no_equilibrium" in out


def test_verify_counterexample_witness(capsys):
    code, report = run_json(capsys, "verify", CE)
    assert code == 1
    res = report["results"][0]
    assert res["necessary"] == []
    dev3 = res["deviations"][2]
    assert dev3["vendor"] == 3 and dev3["sup"] == "1/5"
    reasons = res["definition"]["reasons"]
    r3 = next(r for r in reasons if r["vendor"] == 3)
    assert r3["point"] == "1/2"


def test_verify_batch_file(capsys, tmp_path):
    path = tmp_path / "batch.txt"
    path.write_text("# comment\n1/2,1/2\n\n1/4,1/4,3/4,3/4\n" + CE + "\n")
    for workers in ("1", "2"):
        code, report = run_json(capsys, "verify", "--file", str(path), "--workers", workers)
        assert code == 1
        verdicts = [r["definition"]["equilibrium"] for r in report["results"]]
        assert verdicts == [True, True, False]
    path.write_text("1/2,1/2\n1/4,1/4,3/4,3/4\n")
    assert run(capsys, "verify", "--file", str(path))[0] == 0
    assert run(capsys, "verify", "--file", str(tmp_path / "missing.txt"))[0] == 64


def test_verify_disagreement_exits_2(capsys, monkeypatch):
    monkeypatch.setattr(equilibrium, "check_theorem_conditions", lambda p: equilibrium.Verdict(True))
    code, out, err = run(capsys, "verify", CE)
    assert code == 2
    dump = json.loads(err)
    assert dump["schema"] == "v1"
    assert dump["disagreement"]["profile"] == COUNTEREXAMPLE


def test_synth_canonical(capsys):
    code, report = run_json(capsys, "synth", "--n", "4", "--canonical")
    assert code == 0
    (res,) = report["results"]
    assert res["profile"] == ["1/4", "1/4", "3/4", "3/4"]
    assert res["lengths"] == ["1/4", "0/1", "1/2", "0/1", "1/4"]


def test_synth_samples(capsys):
    code, report = run_json(capsys, "synth", "--n", "6", "--count", "3", "--seed", "7")
    assert code == 0
    assert report["seed"] == 7
    assert len(report["results"]) == 3
    assert all(r["definition"]["equilibrium"] and r["theorem"]["equilibrium"] for r in report["results"])
    again = run_json(capsys, "synth", "--n", "6", "--count", "3", "--seed", "7")[1]
    assert again == report


def test_synth_rejects_small_n(capsys):
    code, _, err = run(capsys, "synth", "--n", "3")
    assert code == 64
    assert "no equilibrium exists for n=3" in err
    assert run(capsys, "synth", "--n", "2")[0] == 64
    assert run(capsys, "synth", "--n", "6", "--count", "0")[0] == 64


@pytest.mark.parametrize("start, grid, outcome, final", [
    ("2/10,9/10", "10", "fixed-point", ["1/2", "1/2"]),
    ("1/12,6/12,11/12", "12", "cycle", None),
    ("1/4,1/4,3/4,3/4", "4", "fixed-point", ["1/4", "1/4", "3/4", "3/4"]),
])
def test_dynamics(capsys, start, grid, outcome, final):
    code, report = run_json(capsys, "dynamics", start, "--grid", grid)
    assert code == 0
    trace = report["trace"]
    assert trace["outcome"] == outcome
    if final:
        assert trace["final"] == final


def test_dynamics_csv_and_errors(capsys, tmp_path):
    path = tmp_path / "trace.csv"
    code, out, _ = run(capsys, "dynamics", "2/10,9/10", "--grid", "10", "--csv", str(path))
    assert code == 0 and "outcome fixed-point" in out
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 5
    assert rows[-1]["to"] in {"1/2"}
    assert run(capsys, "dynamics", "1/3,1/2", "--grid", "4")[0] == 64
    assert run(capsys, "dynamics", "1/12,6/12,11/12", "--grid", "12", "--steps", "2")[0] == 0


def test_repro(capsys):
    code, out, _ = run(capsys, "repro")
    assert code == 0
    assert "FAIL" not in out
    code, report = run_json(capsys, "repro")
    assert code == 0
    assert report["first_failure"] is None
    names = [a["name"] for a in report["assertions"]]
    assert "vendor3_to_half_payoff" in names
    assert all(a["ok"] for a in report["assertions"])


def test_repro_reports_the_first_failure(capsys, monkeypatch):
    real = cli.payoff_closed_form

    def corrupted(loc):
        pay = real(loc)
        return type(pay)(tuple(v + Fraction(1, 1000) for v in pay))

    monkeypatch.setattr(cli, "payoff_closed_form", corrupted)
    code, out, _ = run(capsys, "repro")
    assert code == 3
    assert "first failing assertion: edge_payoffs" in out
