import csv
import io
import json

import pytest

from noisystorage.cli import dispatch


def run_cli(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bounds_ot_prints_both_errors(capsys):
    code, out, _ = run_cli(capsys, "bounds", "ot", "--n", "1e10",
                           "--delta", "0.0106", "--nu", "1", "--r", "0.1")
    assert code == 0
    values = dict(line.split(" = ") for line in out.strip().splitlines())
    assert float(values["eps"]) == pytest.approx(5.675412297e-9, rel=1e-6)
    assert float(values["two_eps"]) == pytest.approx(1.135082459e-8, rel=1e-6)
    assert float(values["ell"]) > 0
    assert set(values) == {"gamma", "capacity", "ell", "ot_rate", "eps",
                           "two_eps"}


def test_bounds_ot_threshold_verdicts(capsys):
    code, out, _ = run_cli(capsys, "bounds", "ot", "--n", "1e10",
                           "--delta", "0.0106", "--r", "0.1",
                           "--threshold", "1e-8")
    assert code == 0
    values = dict(line.split(" = ") for line in out.strip().splitlines())
    # the one-sided error meets the threshold, the 2x statement error
    # does not; both verdicts are visible
    assert values["eps_within_threshold"] == "true"
    assert values["two_eps_within_threshold"] == "false"


def test_bounds_ot_json_format(capsys):
    code, out, _ = run_cli(capsys, "bounds", "ot", "--n", "1e10",
                           "--delta", "0.0106", "--r", "0.0",
                           "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["ot_rate"] == pytest.approx(0.1197, abs=1e-3)


def test_bounds_ot_infeasible_exit_2(capsys):
    code, _, err = run_cli(capsys, "bounds", "ot", "--n", "1e10",
                           "--delta", "0.0106", "--r", "1.0")
    assert code == 2
    assert "infeasible" in err


def test_bounds_ot_invalid_parameter_exit_1(capsys):
    code, _, err = run_cli(capsys, "bounds", "ot", "--n", "1e10",
                           "--delta", "0.3", "--r", "0.1")
    assert code == 1
    assert "delta" in err
    code, _, err = run_cli(capsys, "bounds", "ot", "--n", "10",
                           "--delta", "0.01", "--r", "0.1")
    assert code == 1
    assert "4/delta" in err


def test_bounds_ot_unknown_flag_exit_1(capsys):
    code, _, err = run_cli(capsys, "bounds", "ot", "--bogus", "1")
    assert code == 1


def test_bounds_robust(capsys):
    code, out, _ = run_cli(capsys, "bounds", "robust", "--n", "1e10",
                           "--delta", "0.005", "--r", "0.1",
                           "--p1-sent", "1.0", "--ph-noclick", "0.6",
                           "--pd-noclick", "0.05", "--ph-err", "0.01")
    assert code == 0
    values = dict(line.split(" = ") for line in out.strip().splitlines())
    assert float(values["m1"]) == pytest.approx(4.5e9)
    assert float(values["ell"]) > 0


def test_bounds_qid_and_impersonation(capsys):
    code, out, _ = run_cli(capsys, "bounds", "qid", "--n", "1e9", "--m", "16",
                           "--delta", "0.2", "--ell", "1000",
                           "--d-code", "300000000", "--r", "0.1")
    assert code == 0
    assert "error = " in out
    code, out, _ = run_cli(capsys, "bounds", "impersonation", "--n", "1e8",
                           "--m", "2", "--delta", "0.2", "--r", "0.1")
    assert code == 0
    values = dict(line.split(" = ") for line in out.strip().splitlines())
    assert 0.0 < float(values["error"]) < 1.0
    assert float(values["dishonest_user_error"]) <= float(values["error"])


def test_region_csv_boundary(capsys, tmp_path):
    out_file = tmp_path / "region.csv"
    code, _, _ = run_cli(capsys, "region", "--steps", "100",
                         "--out", str(out_file))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out_file.read_text())))
    assert rows[0].keys() == {"r", "nu", "capacity", "product", "feasible"}
    nu1 = [row for row in rows if float(row["nu"]) == 1.0]
    flips = [(float(a["r"]), float(b["r"])) for a, b in zip(nu1, nu1[1:])
             if a["feasible"] == "true" and b["feasible"] == "false"]
    assert len(flips) == 1
    assert flips[0][0] < 0.571 < flips[0][1] + 0.02


def test_curve_csv_schema_and_rate(capsys, tmp_path):
    out_file = tmp_path / "curve.csv"
    code, _, _ = run_cli(capsys, "curve", "--n", "1e10", "--delta", "0.0106",
                         "--nu", "1", "--steps", "50", "--out", str(out_file))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out_file.read_text())))
    assert list(rows[0].keys()) == ["r", "nu", "n", "delta", "gamma",
                                    "capacity", "ell", "ot_rate", "eps",
                                    "two_eps", "feasible"]
    assert float(rows[0]["ot_rate"]) == pytest.approx(0.1197, abs=1e-3)
    feasible_rates = [float(r["ot_rate"]) for r in rows
                      if r["feasible"] == "true"]
    assert all(b < a for a, b in zip(feasible_rates, feasible_rates[1:]))


def test_curve_empty_when_delta_out_of_range(capsys, tmp_path):
    out_file = tmp_path / "empty.csv"
    code, _, _ = run_cli(capsys, "curve", "--n", "1e10", "--delta", "0.3",
                         "--steps", "10", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert len(lines) == 1  # header only
    assert lines[0].startswith("r,nu,n,delta,gamma")


def test_outputs_byte_identical_for_same_seed(capsys, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run_cli(capsys, "simulate", "rot", "--n", "12",
                             "--ell", "3", "--trials", "20", "--seed", "9",
                             "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_rot_reports_zero_failures(capsys):
    code, out, _ = run_cli(capsys, "simulate", "rot", "--n", "16", "--ell",
                           "4", "--trials", "50", "--seed", "3")
    assert code == 0
    report = json.loads(out)
    assert report["failures"] == 0
    assert report["first_transcript"]["n"] == 16


def test_simulate_robust(capsys):
    code, out, err = run_cli(capsys, "simulate", "robust", "--n", "256",
                             "--delta", "0.02", "--ph-noclick", "0.05",
                             "--ph-err", "0.01", "--trials", "30",
                             "--seed", "4")
    assert code == 0
    report = json.loads(out)
    assert report["aborts"] <= 2
    assert report["decode_failures"] <= 3
    # a 1/3-rate repetition code overspends the syndrome budget at 1%
    # errors; that is allowed but must be called out
    assert report["syndrome_budget_ok"] is False
    assert "syndrome bits" in err


def test_simulate_qid(capsys):
    code, out, _ = run_cli(capsys, "simulate", "qid", "--m", "16",
                           "--code-n", "8", "--ell", "8", "--w-alice", "3",
                           "--w-bob", "3", "--trials", "40", "--seed", "5")
    assert code == 0
    report = json.loads(out)
    assert report["accepts"] == 40
    code, out, _ = run_cli(capsys, "simulate", "qid", "--m", "16",
                           "--code-n", "8", "--ell", "8", "--w-alice", "3",
                           "--w-bob", "7", "--trials", "40", "--seed", "5")
    assert json.loads(out)["accepts"] <= 1


def test_verify_suites_pass(capsys):
    for suite, trials in (("split", "300"), ("hashing", "50"),
                          ("pa", "60"), ("lemma4", "40")):
        code, out, _ = run_cli(capsys, "verify", suite, "--trials", trials,
                               "--seed", "7")
        assert code == 0, suite
        assert "0 violations" in out
    code, out, _ = run_cli(capsys, "verify", "codes")
    assert code == 0
    assert "0 violations" in out


def test_verify_unknown_suite_exit_1(capsys):
    code, _, _ = run_cli(capsys, "verify", "nonsense")
    assert code == 1
