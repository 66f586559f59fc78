import csv
import io
import json
import math

import pytest

from becert.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_constants_json(capsys):
    code, out, _ = run_cli(capsys, "constants")
    assert code == 0
    data = json.loads(out)
    assert abs(data["theta0"] - 3.99589567) <= 1e-7
    assert abs(data["kappa"] - 0.09916191) <= 1e-7
    assert abs(data["esseen_lower"] - 0.409732) <= 1e-5
    assert abs(data["bhattacharya_bound"] - 0.54093654) <= 1e-6
    # round trip
    assert json.loads(json.dumps(data)) == data


def test_constants_csv(capsys):
    code, out, _ = run_cli(capsys, "constants", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["constant", "value"]
    assert rows[1][0] == "theta0"


def test_constants_out_file(tmp_path, capsys):
    path = tmp_path / "c.json"
    code, out, _ = run_cli(capsys, "constants", "--out", str(path))
    assert code == 0
    assert out == ""
    data = json.loads(path.read_text())
    assert "kappa" in data


def test_certify_theorem2_spot_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "certify", "--theorem", "2")
    assert code == 0
    report = json.loads(out)
    assert report["passed"]
    assert report["mode"] == "spot"


def test_certify_theorem1_spot_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "certify", "--theorem", "1")
    assert code == 0
    assert json.loads(out)["passed"]


def test_certify_unreachable_target_exit_two(capsys):
    code, out, _ = run_cli(capsys, "certify", "--theorem", "2", "--target", "0.30")
    assert code == 2
    report = json.loads(out)
    assert not report["passed"]
    failing = [c for c in report["checks"] if not c["passed"]]
    assert failing


def test_sweep_cli(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--k", "1", "--eps-lo", "1.2",
                           "--eps-hi", "1.4", "--target", "0.35", "--cells", "3")
    assert code == 0
    report = json.loads(out)
    assert report["passed"]
    assert report["global_max"] <= 0.35
    assert len(report["cells"]) >= 3


def test_sweep_cli_failure_exit_two(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--k", "1", "--eps-lo", "0.95",
                           "--eps-hi", "1.05", "--target", "0.29", "--cells", "2",
                           "--max-depth", "1")
    assert code == 2
    assert not json.loads(out)["passed"]


def test_empirical_cli_rows(capsys):
    code, out, _ = run_cli(capsys, "empirical", "--dist", "rademacher",
                           "--n-max", "20", "--bound", "theorem2")
    assert code == 0
    report = json.loads(out)
    assert len(report["rows"]) == 20
    assert all(r["passed"] for r in report["rows"])


def test_empirical_cli_two_point_theorem1(capsys):
    code, out, _ = run_cli(capsys, "empirical", "--dist", "two_point:0.9",
                           "--n-max", "10", "--bound", "theorem1")
    assert code == 0
    assert json.loads(out)["passed"]


def test_empirical_cli_csv(capsys):
    code, out, _ = run_cli(capsys, "empirical", "--dist", "rademacher",
                           "--n-max", "5", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "distance", "bound", "margin", "passed"]
    assert len(rows) == 6


def test_empirical_cli_dist_file(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps(
        {"atoms": [{"x": -1.0, "p": 0.5}, {"x": 1.0, "p": 0.5}]}))
    code, out, _ = run_cli(capsys, "empirical", "--dist", str(path), "--n-max", "3")
    assert code == 0


def test_empirical_cli_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{\"atoms\": [{\"x\": 0.0, \"p\": 2.0}]}")
    code, _, err = run_cli(capsys, "empirical", "--dist", str(path))
    assert code == 1
    assert "error" in err


def test_poisson_cli(capsys):
    code, out, _ = run_cli(capsys, "poisson", "--dist", "rademacher",
                           "--lambda", "4", "--tail-tol", "1e-10")
    assert code == 0
    row = json.loads(out)
    assert row["bound"] == pytest.approx(0.152550, abs=1e-9)
    assert row["passed"]
    assert row["truncation_mass"] <= 1e-10


def test_mixed_cli_exponential(capsys):
    code, out, _ = run_cli(capsys, "mixed", "--scenario", "exponential:t=100",
                           "--beta3", "1")
    assert code == 0
    row = json.loads(out)
    assert abs(row["bound"] - 0.05408) <= 5e-6
    assert abs(row["coefficient"] - 0.5408) <= 5e-4


def test_mixed_cli_gamma(capsys):
    code, out, _ = run_cli(capsys, "mixed", "--scenario", "gamma:r=2,t=1",
                           "--beta3", "1.3")
    assert code == 0
    row = json.loads(out)
    assert row["bound"] == pytest.approx(
        0.3051 * math.gamma(1.5) / math.gamma(2.0) * 1.3, rel=1e-9)


def test_mixed_cli_heavy(capsys):
    code, out, _ = run_cli(capsys, "mixed", "--scenario", "heavy:alpha=2.5,t=25",
                           "--mu", "1", "--sigma2", "1", "--beta3", "3")
    assert code == 0
    row = json.loads(out)
    assert row["E_abs_V"] == pytest.approx(3.5 / (0.5 * 1.5))
    assert math.isfinite(row["bound"]) and row["bound"] > 0.0


def test_mixed_cli_unknown_scenario(capsys):
    code, _, err = run_cli(capsys, "mixed", "--scenario", "weibull:t=1")
    assert code == 1
    assert "error" in err


def test_cli_reports_are_deterministic(tmp_path, capsys):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    for p in (p1, p2):
        code, _, _ = run_cli(capsys, "sweep", "--k", "1", "--eps-lo", "1.2",
                             "--eps-hi", "1.3", "--target", "0.4",
                             "--cells", "2", "--out", str(p))
        assert code == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_cli_parallel_matches_serial(tmp_path, capsys):
    p1, p2 = tmp_path / "s.json", tmp_path / "p.json"
    base = ["sweep", "--k", "1", "--eps-lo", "1.1", "--eps-hi", "1.3",
            "--target", "0.4", "--cells", "2"]
    assert run_cli(capsys, *base, "--out", str(p1))[0] == 0
    assert run_cli(capsys, *base, "--parallelism", "2", "--out", str(p2))[0] == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_sweep_cli_finite_n_flag(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--k", "1", "--eps-lo", "1.5",
                           "--eps-hi", "1.6", "--target", "0.5", "--cells", "2",
                           "--big-n", "8", "--finite-n")
    assert code == 0
    report = json.loads(out)
    assert report["passed"]
    # finite-n modes must appear among the evaluated extremal points
    kinds = {c["point"]["n_mode"]["type"] for c in report["cells"]}
    assert kinds <= {"finite", "uniform"}


def test_empirical_parallel_matches_serial(tmp_path, capsys):
    p1, p2 = tmp_path / "s.json", tmp_path / "p.json"
    base = ["empirical", "--dist", "two_point:0.8", "--n-max", "8"]
    assert run_cli(capsys, *base, "--out", str(p1))[0] == 0
    assert run_cli(capsys, *base, "--parallelism", "3", "--out", str(p2))[0] == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_env_overrides_quadrature_tolerance():
    import os
    import subprocess
    import sys
    out = subprocess.run(
        [sys.executable, "-c",
         "from becert import certifier; print(certifier.DEFAULT_TOL)"],
        capture_output=True, text=True, check=True,
        env=dict(os.environ, BE_CERTIFY_TOL="1e-6"),
    )
    assert float(out.stdout) == 1e-6
