from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from fcert.cli import EXIT_FAILED, EXIT_NOT_REACHED, EXIT_OK, EXIT_USAGE, dispatch


def _reports(d):
    return sorted(d.glob("*.json"))


def test_gamma_bounds_writes_report(report_dir, capsys):
    assert dispatch(["gamma-bounds", "--out", str(report_dir)]) == EXIT_OK
    line = capsys.readouterr().out.strip()
    assert line.startswith("gamma-bounds: certified")
    (path,) = _reports(report_dir)
    assert json.loads(path.read_text())["schema"] == "fc-report/1"


def test_fc_out_overrides_flag(tmp_path, monkeypatch):
    env_dir = tmp_path / "env"
    monkeypatch.setenv("FC_OUT", str(env_dir))
    assert dispatch(["claim-b1", "--out", str(tmp_path / "flag")]) == EXIT_OK
    assert len(_reports(env_dir)) == 1
    assert not (tmp_path / "flag").exists()


def test_reports_accumulate(report_dir):
    for _ in range(2):
        dispatch(["gamma-bounds", "--out", str(report_dir)])
    assert len(_reports(report_dir)) == 2


def test_failed_bracket_exit_code(report_dir):
    assert dispatch(["gamma-bounds", "--gamma", "0.2484196,0.2484197", "--out", str(report_dir)]) == EXIT_FAILED


def test_fast_mode_not_reached(report_dir):
    assert dispatch(["claim-b4", "--mode", "fast", "--out", str(report_dir)]) == EXIT_NOT_REACHED


def test_smoke_sweep(report_dir, capsys):
    assert dispatch(["claim-b3", "--manifest", "smoke", "--out", str(report_dir)]) == EXIT_OK
    assert "50 segments" in capsys.readouterr().out


def test_custom_manifest_with_refinement(report_dir, tmp_path):
    m = tmp_path / "one.manifest"
    m.write_text("# tag eta1_num eta1_den eta2_num eta2_den target\nB2-case6 3 10 3001 10000 -1\n")
    code = dispatch(["claim-b2", "--manifest", str(m), "--refine", "1", "--out", str(report_dir)])
    assert code == EXIT_FAILED
    data = json.loads(_reports(report_dir)[0].read_text())
    assert data["segments_checked"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nope"],
        ["claim-b2", "--parallelism", "0"],
        ["claim-b2", "--refine", "9"],
        ["claim-b2", "--manifest", "/does/not/exist"],
        ["claim-b1", "--gamma", "abc"],
        ["claim-b1", "--mode", "exact"],
        ["gamma-bounds", "--gamma", "0.25"],
        ["simulate"],
        ["oracle-binomial", "--n", "50,200"],
    ],
)
def test_usage_errors(argv, report_dir):
    assert dispatch(argv + ["--out", str(report_dir)] if argv else argv) == EXIT_USAGE


def test_oracle_binomial_csv(report_dir, capsys):
    assert dispatch(["oracle-binomial", "--sets", "3", "--seed", "1", "--out", str(report_dir)]) == EXIT_OK
    (path,) = report_dir.glob("binomial-*.csv")
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 9 and set(rows[0]) == {"n", "params", "exact", "approx", "err"}


@pytest.mark.parametrize("mode, column", [("exhaustive", "X_H"), ("monte-carlo", "X_H"), ("count", "X_H"), ("local-search", "best_H")])
def test_simulate_modes(mode, column, report_dir, capsys):
    n2 = "6" if mode != "local-search" else "30"
    argv = ["simulate", "--n2", n2, "--mode", mode, "--samples", "2000", "--seed", "3", "--out", str(report_dir)]
    assert dispatch(argv) == EXIT_OK
    (path,) = report_dir.glob("simulate-*.csv")
    header = next(csv.reader(path.open()))
    assert header == ["seed", "n2", "H", column]
    if mode == "exhaustive":
        assert "4645/4096" in capsys.readouterr().out


def test_selftest_is_deterministic(capsys):
    assert dispatch(["selftest"]) == EXIT_OK
    first = capsys.readouterr().out
    assert dispatch(["selftest"]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert "FAIL" not in first


def test_selftest_detects_rounding_fault(capsys):
    assert dispatch(["selftest", "--inject-fault"]) == EXIT_FAILED
    out = capsys.readouterr().out
    assert "FAIL interval arithmetic containment" in out
    # the fault hook is switched off again afterwards
    assert dispatch(["selftest"]) == EXIT_OK


def test_entry_point_runs(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "fcert.cli", "claim-b1", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.count("\n") == 1
