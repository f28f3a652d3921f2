import json
import math
import subprocess
import sys

import pytest

from helstrom.cli import main

PE_1_0 = 0.5 * (1 - math.sqrt(1 - math.exp(-4)))


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ("HELSTROM_DIM", "HELSTROM_JOBS", "HELSTROM_EIG_TOL"):
        monkeypatch.delenv(key, raising=False)


def run_json(capsys, *argv):
    assert main(list(argv)) == 0
    return json.loads(capsys.readouterr().out)


def test_point_x_zero(capsys):
    out = run_json(capsys, "point", "--x", "0", "--p", "1", "--json")
    assert out["pe_pure"] == out["pe_mixed"] == 0.5
    assert out["i_gain"] == 0.0


def test_point_p_zero(capsys):
    out = run_json(capsys, "point", "--x", "1", "--p", "0", "--json")
    assert out["i_gain"] == 0.0
    assert abs(out["pe_pure"] - PE_1_0) < 1e-8


def test_point_oracle(capsys):
    out = run_json(capsys, "point", "--x", "1", "--p", "1", "--oracle", "--json")
    assert abs(out["pe_mixed"] - out["pe_mixed_gram"]) < 1e-8
    assert abs(out["pe_pure"] - out["pe_pure_analytic"]) < 1e-8


def test_point_human_readable(capsys):
    assert main(["point", "--x", "1", "--p", "1"]) == 0
    text = capsys.readouterr().out
    assert "i_gain" in text and "max_norm_deficit" in text


def test_point_auto_dim(capsys):
    out = run_json(capsys, "point", "--x", "6", "--p", "2", "--auto-dim", "1e-12", "--json")
    assert out["dim_used"] > 50
    assert out["max_norm_deficit"] < 1e-12


def test_point_ill_conditioned_oracle(capsys):
    assert main(["point", "--x", "1", "--p", "1e-8", "--oracle"]) == 3
    assert "Gram" in capsys.readouterr().err


def test_truncation_failure_exit(capsys):
    assert main(["point", "--x", "3", "--p", "3", "--dim", "5"]) == 3


def test_bad_arguments(capsys):
    assert main(["point", "--x", "nan", "--p", "0"]) == 2
    assert main(["grid", "--x-range", "3:0:5", "--out", "unused.csv"]) == 2
    assert main(["grid", "--x-range", "0:1", "--out", "unused.csv"]) == 2
    assert main(["converge", "--x", "1", "--p", "1", "--dims", "30,20"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["point", "--x", "1"])
    assert info.value.code == 2


def test_io_failure(tmp_path, capsys):
    bad = tmp_path / "missing" / "g.csv"
    assert main(["grid", "--x-range", "0:0:1", "--p-range", "0:0:1", "--out", str(bad)]) == 4
    assert str(bad) in capsys.readouterr().err


def test_grid_single_cell(tmp_path):
    out = tmp_path / "one.csv"
    assert main(["grid", "--x-range", "0:0:1", "--p-range", "0:0:1", "--out", str(out)]) == 0
    assert out.read_text() == "x,p,pe_pure,pe_mixed,i_pure,i_mixed,i_gain\n0,0,0.5,0.5,0,0,0\n"
    meta = json.loads((tmp_path / "one.csv.manifest.json").read_text())
    assert meta["cell_count"] == 1


def test_grid_negative_range_syntax(tmp_path):
    out = tmp_path / "neg.json"
    argv = ["grid", "--x-range=-1:1:3", "--p-range=-1:1:2", "--format", "json", "--out", str(out)]
    assert main(argv) == 0
    rows = json.loads(out.read_text())["rows"]
    assert [(r["x"], r["p"]) for r in rows] == [(-1, -1), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 1)]


def test_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\ndim = 61\njobs=2\nx_range = 0:1:2\np_range=0:1:2\n")
    out = tmp_path / "g.csv"

    def dim_used(*extra):
        assert main(["grid", "--config", str(cfg), "--out", str(out), *extra]) == 0
        return json.loads((tmp_path / "g.csv.manifest.json").read_text())["dim_used"]

    assert dim_used() == 61
    monkeypatch.setenv("HELSTROM_DIM", "55")
    assert dim_used() == 55
    assert dim_used("--dim", "52") == 52
    assert dim_used("--auto-dim", "1e-12") == 50


def test_env_eig_tol_and_bad_config(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HELSTROM_EIG_TOL", "-1")
    assert main(["point", "--x", "1", "--p", "1"]) == 2
    monkeypatch.delenv("HELSTROM_EIG_TOL")
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour=blue\n")
    assert main(["point", "--x", "1", "--p", "1", "--config", str(cfg)]) == 2
    monkeypatch.setenv("HELSTROM_JOBS", "zero")
    assert main(["grid", "--out", str(tmp_path / "x.csv")]) == 2


def test_converge(capsys):
    out = run_json(capsys, "converge", "--x", "1", "--p", "1", "--dims", "10,20,30,40,50", "--json")
    assert [r["dim"] for r in out["rows"]] == [10, 20, 30, 40, 50]
    assert abs(out["rows"][-1]["delta_mixed"]) < 1e-8
    assert abs(out["rows"][-1]["delta_pure"]) < 1e-8


def test_converge_vacuum(capsys):
    out = run_json(capsys, "converge", "--x", "0", "--p", "0", "--dims", "1,5,50", "--json")
    assert all(r["pe_pure"] == r["pe_mixed"] == 0.5 for r in out["rows"])


def test_converge_flat_corner(capsys):
    out = run_json(capsys, "converge", "--x", "3", "--p", "3", "--dims", "50,100", "--json")
    a, b = out["rows"]
    assert abs(a["pe_pure"] - b["pe_pure"]) < 1e-9
    assert abs(a["pe_mixed"] - b["pe_mixed"]) < 1e-9


def test_converge_table_without_gram(capsys):
    assert main(["converge", "--x", "1", "--p", "1e-9", "--dims", "50"]) == 0
    captured = capsys.readouterr()
    assert "n/a" in captured.out
    assert "warning" in captured.err


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "helstrom", "point", "--x", "0", "--p", "0", "--json"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(res.stdout)["pe_pure"] == 0.5
