"""Command-line front end: contract examples, exit codes, artifacts."""

import csv
import json
import math
import subprocess
import sys

import pytest

CMD = [sys.executable, "-m", "boltzkit.cli"]


def run(*args, **kw):
    return subprocess.run(CMD + list(args), capture_output=True, text=True, **kw)


def test_equilibrium_classical_example():
    r = run("equilibrium", "--n", "2", "--rho", "1", "--T", "0.159155",
            "--vol", "1", "--eps", "0")
    assert r.returncode == 0
    assert "C=1.0" in r.stdout


def test_dist_doubled_temperature_example():
    r = run("dist", "--ref-T", "1", "--field-T", "2", "--rho", "1", "--n", "2")
    assert r.returncode == 0
    assert "0.306853" in r.stdout  # 1 - log 2


def test_roots_example():
    r = run("roots", "--c", "0.5")
    assert r.returncode == 0
    assert "lower=" in r.stdout and "upper=" in r.stdout
    lo = float(r.stdout.split("lower=")[1].split()[0])
    hi = float(r.stdout.split("upper=")[1].split()[0])
    assert lo < 1.0 < hi
    for x in (lo, hi):
        assert abs(x - 1.0 - math.log(x) - 0.5) < 1e-5  # printed at 6 digits


def test_unknown_flag_is_usage_error():
    r = run("equilibrium", "--does-not-exist", "1")
    assert r.returncode == 2


def test_unknown_subcommand_is_usage_error():
    r = run("frobnicate")
    assert r.returncode == 2


def test_domain_error_exit_code():
    # boson mass above the condensation threshold has no solution
    r = run("equilibrium", "--n", "3", "--rho", "100", "--T", "0.01",
            "--vol", "1", "--eps", "1")
    assert r.returncode == 1
    assert r.stdout == "" or "C=" not in r.stdout


def test_config_file_defaults_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 2\nrho = 1\nT = 0.159155\nvol = 1\neps = 0\n")
    r = run("equilibrium", "--config", str(cfg))
    assert r.returncode == 0
    assert "C=1.0" in r.stdout
    # flags win over config values
    r2 = run("equilibrium", "--config", str(cfg), "--rho", "2")
    assert r2.returncode == 0
    got = float(r2.stdout.split("C=")[1].split()[0])
    assert got == pytest.approx(2.0, abs=1e-5)  # T is only 6 digits of 1/(2 pi)


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n = 2\nbogus_key = 5\n")
    r = run("equilibrium", "--config", str(cfg))
    assert r.returncode == 2


SIM_ARGS = ["simulate", "--init", "bimodal", "--grid", "24", "--steps", "4",
            "--rho", "0.5", "--seed", "3"]


def test_simulate_csv_artifact(tmp_path):
    out = tmp_path / "run.csv"
    r = run(*SIM_ARGS, "--out", str(out), "--format", "csv")
    assert r.returncode == 0, r.stderr
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "S", "E", "F", "G", "A", "B"]
    assert len(rows) == 1 + 5  # header + initial record + 4 steps
    for row in rows[1:]:
        vals = [float(x) for x in row]  # every cell parses
        assert len(vals) == 7
    # 17 significant digits survive a parse round trip
    assert float(rows[2][1]) == float(repr(float(rows[2][1])))


def test_simulate_json_matches_csv(tmp_path):
    out_c, out_j = tmp_path / "run.csv", tmp_path / "run.jsonl"
    assert run(*SIM_ARGS, "--out", str(out_c), "--format", "csv").returncode == 0
    assert run(*SIM_ARGS, "--out", str(out_j), "--format", "json").returncode == 0
    with open(out_c, newline="") as fh:
        rows = list(csv.reader(fh))
    with open(out_j) as fh:
        recs = [json.loads(line) for line in fh if line.strip()]
    header = rows[0]
    assert len(recs) == len(rows) - 1
    for row, rec in zip(rows[1:], recs):
        assert list(rec.keys()) == header
        for key, cell in zip(header, row):
            assert rec[key] == float(cell)


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(*SIM_ARGS, "--out", str(a), "--format", "csv")
    run(*SIM_ARGS, "--out", str(b), "--format", "csv")
    assert a.read_bytes() == b.read_bytes()


def test_simulate_unwritable_out_path():
    r = run(*SIM_ARGS, "--out", "/nonexistent-dir/run.csv", "--format", "csv")
    assert r.returncode == 1
