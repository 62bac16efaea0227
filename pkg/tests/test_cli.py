import csv
import io
import json
import math
from pathlib import Path

import pytest

from tslv import cli, model, presets

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("params,regime", [
    ("fig2", "ExclusionYWins"),
    ("r=0.5,s=0.3,alpha=0.3,beta=2,K=1,L=1", "ExclusionXWins"),
    ('{"r":1,"s":1,"alpha":2,"beta":2,"K":1,"L":1}', "Bistable"),
    ("coexistence", "Coexistence"),
    ("r=1,s=1,alpha=0.5,beta=0.25,K=4,L=2", "DegenerateLine"),
])
def test_classify(params, regime, capsys):
    code, out, _ = run(["classify", "--params", params], capsys)
    body = json.loads(out)
    assert code == 0 and body["regime"] == regime
    assert body["EL"] == [0.0, body["params"]["L"]]


def test_classify_estar(capsys):
    _, out, _ = run(["classify", "--params", "coexistence"], capsys)
    body = json.loads(out)
    assert body["Estar"] == pytest.approx([2 / 3, 2 / 3], rel=1e-15)
    assert body["feasibility"]["Estar_feasible"]


def test_params_from_file(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps(presets.PARAMS["bistable"].to_dict()))
    code, out, _ = run(["classify", "--params", f], capsys)
    assert code == 0 and json.loads(out)["regime"] == "Bistable"


def test_simulate_fig2_scenario(tmp_path, capsys):
    out_csv, rep = tmp_path / "t.csv", tmp_path / "r.json"
    code, _, _ = run(["simulate", SCENARIOS / "fig2.json", "--out", out_csv, "--report", rep], capsys)
    assert code == 0
    report = json.loads(rep.read_text())
    assert [r["steps_to_invariant_region"] for r in report["runs"]] == [2, 3, 5]
    assert all(r["converged"] and r["target"] == "EL" for r in report["runs"])
    data = rows(out_csv.read_text())
    assert list(data[0]) == ["t", "x", "y", "mu", "mode", "region", "run"]
    first = [r for r in data if r["run"] == "0"]
    assert [r["region"] for r in first[:3]] == ["Omega3", "Omega3", "Omega2"]
    assert all(r["region"] == "Omega2" for r in first[2:])
    assert float(first[1]["y"]) == 1.3 / 1.48


def test_simulate_fig5_modes(tmp_path, capsys):
    out_csv = tmp_path / "t.csv"
    code, stdout, _ = run(["simulate", SCENARIOS / "fig5.json", "--out", out_csv], capsys)
    assert code == 0
    assert {r["mode"] for r in rows(out_csv.read_text())} == {"Recursion", "DenseODE"}
    assert all(r["target"] == "Estar" and r["converged"] for r in json.loads(stdout)["runs"])


def test_simulate_origin_is_constant(capsys):
    code, out, err = run(["simulate", "--params", "fig2", "--timescale", "Z", "--start", "0,0",
                          "--budget", "20"], capsys)
    data = rows(out)
    assert code == 0 and len(data) == 21
    assert {(r["x"], r["y"]) for r in data} == {("0", "0")}
    assert json.loads(err)["runs"][0]["target"] == "E0"


def test_simulate_budget_exceeded(capsys):
    code, _, _ = run(["simulate", "--params", "fig2", "--timescale", "Z", "--start", "0.5,0.5",
                      "--budget", "5", "--horizon", "100"], capsys)
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["simulate", "--params", "fig2", "--timescale", "Z", "--start", "-1,0.5"],
    ["simulate", "--params", "fig2", "--timescale", "Z", "--t0", "0.5", "--start", "1,1"],
    ["simulate", "--params", "nope", "--start", "1,1"],
    ["simulate", "/no/such/file.json"],
    ["simulate", "--params", "r=1,s=1", "--start", "1,1"],
    ["classify", "--params", "r=-1,s=1,alpha=1,beta=1,K=1,L=1"],
    ["classify"],
    ["phaseplane", "--params", "fig2", "--x-range", "2,1"],
    ["phaseplane", "--params", "fig2", "--mu", "-1"],
    ["phaseplane", "--params", "fig2", "--t", "1"],
    ["phaseplane", "--params", "fig2", "--timescale", "quantum", "--t", "3"],
    ["verify", "/no/such/suite.json"],
    ["verify", "--mutation", "nope"],
    ["frobnicate"],
])
def test_config_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(cli.main(argv))
    assert exc.value.code == 1


def test_bad_scenario_keys(tmp_path, capsys):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"params": "fig2", "x0": 1, "y0": 1, "colour": "red"}))
    assert run(["simulate", f], capsys)[0] == 1
    f.write_text("{not json")
    assert run(["simulate", f], capsys)[0] == 1


def test_phaseplane_mu_zero_matches_nullclines(capsys):
    code, out, _ = run(["phaseplane", "--params", "fig2", "--mu", "0", "--x-range", "0,1", "--n-samples", "11"],
                       capsys)
    data = rows(out)
    assert code == 0
    null = [r for r in data if r["mu"] == "nan"]
    curve = [r for r in data if r["mu"] == "0"]
    assert {(r["which"], r["x"], r["y"]) for r in null} == {(r["which"], r["x"], r["y"]) for r in curve}
    for r in null:
        fn = model.nullcline_h if r["which"] == "h" else model.nullcline_k
        assert float(r["y"]) == fn(presets.PARAMS["fig2"], float(r["x"]))
        assert math.isnan(float(r["t"]))


def test_phaseplane_timescale_points(capsys):
    code, out, _ = run(["phaseplane", "--params", "fig2", "--timescale", "quantum", "--t", "1,4",
                        "--n-samples", "5"], capsys)
    data = rows(out)
    assert code == 0
    assert {(r["t"], r["mu"]) for r in data if r["t"] != "nan"} == {("1", "1"), ("4", "4")}


def test_phaseplane_degenerate_curves_coincide(capsys):
    _, out, _ = run(["phaseplane", "--params", "degenerate", "--mu", "0.5", "--x-range", "0,4",
                     "--n-samples", "9"], capsys)
    data = [r for r in rows(out) if r["mu"] == "0.5"]
    h = [(r["x"], float(r["y"])) for r in data if r["which"] == "h"]
    k = [(r["x"], float(r["y"])) for r in data if r["which"] == "k"]
    assert len(h) == len(k) > 0
    assert all(a[0] == b[0] and a[1] == pytest.approx(b[1], abs=1e-12) for a, b in zip(h, k))


def test_output_is_byte_stable(tmp_path, capsys):
    outs = []
    for i in range(2):
        f = tmp_path / f"o{i}.csv"
        run(["simulate", SCENARIOS / "fig5.json", "--out", f, "--report", tmp_path / f"r{i}.json"], capsys)
        outs.append((f.read_bytes(), (tmp_path / f"r{i}.json").read_bytes()))
    assert outs[0] == outs[1]


SMALL_SUITE = {
    "seed": 1,
    "checks": [
        {"check": "sign_lemmas", "id": "sign", "params": "fig2", "n_samples": 200},
        {"check": "exp_identities", "id": "exp", "timescales": ["Z", "quantum"], "n_samples": 40},
    ],
}


def test_verify_small_suite(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps(SMALL_SUITE))
    code, out, err = run(["verify", suite, "--no-elapsed"], capsys)
    body = json.loads(out)
    assert code == 0 and body["passed"] and "elapsed" not in body["reports"][0]
    assert "check_id" in err
    code2, out2, _ = run(["verify", suite, "--no-elapsed", "--workers", "2", "--quiet"], capsys)
    assert code2 == 0 and out2 == out
    _, out3, _ = run(["verify", suite, "--no-elapsed", "--seed", "2", "--quiet"], capsys)
    assert out3 != out


@pytest.mark.parametrize("mutation", ["flip_a1", "circle_minus_no_mu"])
def test_verify_mutation_exits_3(tmp_path, capsys, mutation):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps(SMALL_SUITE))
    code, out, _ = run(["verify", suite, "--mutation", mutation, "--quiet"], capsys)
    assert code == 3 and not json.loads(out)["passed"]


def test_verify_invalid_suite(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps({"checks": [{"check": "nope"}]}))
    assert run(["verify", suite], capsys)[0] == 1


def test_fmt():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(-0.0) == "0"
    assert cli.fmt(2.0) == "2"
    assert cli.fmt(math.nan) == "nan"


def test_shipped_suite_is_packaged():
    cfg = cli.load_suite_arg("full")
    assert len(cfg["checks"]) >= 40 and isinstance(cfg["seed"], int)
