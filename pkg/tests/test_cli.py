import json
import subprocess
import sys

from logperiods.cli import main
from logperiods.phimod import FilteredPhiModule
from logperiods.lowdim import dim2_module


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_pollack_stdout_json(capsys):
    code, out = run_cli(["dim2-pollack", "--nmax", "2"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    assert data["kind"] == "dim2-pollack"


def test_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        assert main(["norm-bounds", "--interval", "0..1", "--nmax", "1", "--out", str(target)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_jobs_do_not_change_output(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["norm-bounds", "--interval=-1..1", "--nmax", "1"]
    assert main(base + ["--out", str(a)]) == 0
    assert main(base + ["--jobs", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_csv_format(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["norm-bounds", "--interval", "0..0", "--nmax", "1", "--format", "csv", "--out", str(out)]) == 0
    text = out.read_text()
    header = text.splitlines()[0].split(",")
    assert "norm_log" in header and "bounds_ok" in header
    assert "0..0" in text
    # rationals render as num/den
    assert "/1" in text


def test_subinterval_flag(capsys):
    code, out = run_cli(
        ["norm-bounds", "--interval", "0..1", "--subinterval", "1..1", "--nmax", "1"],
        capsys,
    )
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 1
    assert rows[0]["Jp"] == "1..1"


def test_polygon_suite_module_file(tmp_path, capsys):
    mod = dim2_module(3, 1, 0, 1)
    path = tmp_path / "mod.json"
    path.write_text(json.dumps(mod.to_json_dict()))
    code, out = run_cli(["polygon-suite", "--module", str(path)], capsys)
    assert code == 0
    data = json.loads(out)
    verdict = data["rows"][-1]
    assert verdict["katz_mazur_ok"] and verdict["strongly_divisible"]
    assert verdict["weakly_admissible"] is True


def test_polygon_figure_written(tmp_path):
    out = tmp_path / "poly.json"
    assert main(["polygon-suite", "--r", "1", "--out", str(out), "--figures"]) == 0
    assert (tmp_path / "poly.png").exists()
    data = json.loads(out.read_text())
    assert data["figure"].endswith("poly.png")


def test_slope_trace_figure_and_csv(tmp_path):
    out = tmp_path / "trace.csv"
    code = main(
        [
            "slope-trace",
            "--r",
            "1",
            "--nmax",
            "2",
            "--format",
            "csv",
            "--out",
            str(out),
            "--figures",
        ]
    )
    assert code == 0
    assert (tmp_path / "trace.png").exists()
    assert "log_norm_dec" in out.read_text().splitlines()[0]


def test_z_recursion_modes(capsys):
    code, out = run_cli(["z-recursion", "--r", "1", "--N", "1", "--nmax", "2"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["rows"][-1]["theta_surjectivity"] is True
    code, out = run_cli(
        ["z-recursion", "--r", "1", "--N", "1", "--nmax", "2", "--mode", "negativeN"],
        capsys,
    )
    assert code == 0
    tail = json.loads(out)["rows"][-1]
    assert tail["low_level_vanishing"] and tail["start_surjectivity"]


def test_divisor_check_cli(capsys):
    code, out = run_cli(["divisor-check", "--r", "1", "--nmax", "2"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    assert data["rows"][0]["match"] is True


def test_dim3_check_cli(capsys):
    code, out = run_cli(["dim3-check", "--nmax", "2"], capsys)
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_periods_invariants_cli(capsys):
    code, out = run_cli(
        ["periods-invariants", "--nmax", "1", "--lmin", "2", "--lmax", "3"], capsys
    )
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 2
    assert all(r["agree_degree"] and r["agree_lambda"] for r in rows)
    # the |J| = p cell disagrees with the published mu but matches the corrected one
    anomaly = [r for r in rows if r["J"] == "0..2"]
    assert anomaly and not anomaly[0]["agree_mu"] and anomaly[0]["agree_mu_corrected"]


def test_violation_exit_code(capsys):
    # a slope candidate far outside the proven brackets is reported and
    # flagged through the exit status
    code, out = run_cli(
        ["slope-trace", "--r", "1", "--nmax", "2", "--t-candidate", "100"], capsys
    )
    assert code == 1
    assert json.loads(out)["ok"] is False


def test_periods_invariants_explicit_interval(capsys):
    code, out = run_cli(
        ["periods-invariants", "--nmax", "1", "--interval", "0..1"], capsys
    )
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 1 and rows[0]["J"] == "0..1"


def test_usage_errors(capsys):
    # figures without --out
    assert main(["dim2-pollack", "--nmax", "1", "--figures"]) == 2
    # z-recursion without a module
    assert main(["z-recursion", "--nmax", "1"]) == 2
    # even prime
    assert main(["dim2-pollack", "--p", "2", "--nmax", "1"]) == 2
    capsys.readouterr()


def test_argparse_usage_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "logperiods.cli", "no-such-kind"],
        capture_output=True,
    )
    assert proc.returncode == 2


def test_installed_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "logperiods.cli", "dim2-pollack", "--nmax", "1"],
        capture_output=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"] is True
