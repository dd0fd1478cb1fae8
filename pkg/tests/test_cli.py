import json

import numpy as np
import pytest

from frgs.cli import main
from frgs.field import Grid, GridField, read_field_csv, write_field_csv

FAST = dict(N=2, s=0.5, p=2.5, q=4.0, L=16.0, n=64, tol_residual=5e-3)


def _write_cfg(tmp_path, **cfg):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return path


def test_solve_writes_four_files(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, **FAST)
    assert main(["solve", str(cfg)]) == 0
    out = tmp_path / "run_out"
    names = sorted(p.name for p in out.iterdir())
    assert names == ["field.csv", "manifest.json", "profile.csv", "summary.json"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["converged"] is True and summary["pde_residual"] <= 5e-3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config_echo"]["n"] == 64
    assert manifest["artifact_version"] == "0.1.0"
    assert len(manifest["outputs"]) == 4
    u = read_field_csv(out / "field.csv")
    assert u.grid == Grid(2, 16.0, 64)
    rows = (out / "profile.csv").read_text().splitlines()
    assert rows[0] == "r,u"
    r0, u0 = map(float, rows[1].split(","))
    assert r0 == 0.0 and u0 == u.values.max()
    printed = json.loads(capsys.readouterr().out)
    assert printed["energy"] == summary["energy"]


def test_solve_replay_bit_identical(tmp_path):
    cfg = _write_cfg(tmp_path, **FAST)
    assert main(["solve", str(cfg), "--out", str(tmp_path / "a")]) == 0
    echo = json.loads((tmp_path / "a" / "manifest.json").read_text())["config_echo"]
    cfg2 = tmp_path / "echo.json"
    cfg2.write_text(json.dumps(echo))
    assert main(["solve", str(cfg2), "--out", str(tmp_path / "b")]) == 0
    for name in ("summary.json", "profile.csv", "field.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_solve_missing_field(tmp_path, capsys):
    d = dict(FAST)
    d.pop("s")
    assert main(["solve", str(_write_cfg(tmp_path, **d))]) == 1
    err = capsys.readouterr().err
    assert "missing" in err and "s" in err


@pytest.mark.parametrize("bad", [{"colour": 2}, {"n": 60}, {"p": 5.0}])
def test_solve_bad_config(tmp_path, bad):
    assert main(["solve", str(_write_cfg(tmp_path, **dict(FAST, **bad)))]) == 1


def test_solve_missing_file(tmp_path):
    assert main(["solve", str(tmp_path / "nope.json")]) == 1


def test_solve_nonconvergence_exit_2(tmp_path, capsys):
    assert main(["solve", str(_write_cfg(tmp_path, **dict(FAST, max_iters=1)))]) == 2
    assert (tmp_path / "run_out" / "summary.json").exists()
    assert "max_iters" in capsys.readouterr().err


def test_check(capsys):
    assert main(["check", "2.5", "4", "2", "0.5", "--samples", "100000"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["mu_hat"] > 2
    assert main(["check", "5", "4", "2", "0.5"]) == 1
    assert main(["check", "abc", "4", "2", "0.5"]) == 1


def _field_csv(tmp_path, rng):
    g = Grid(2, 4.0, 16)
    path = tmp_path / "f.csv"
    write_field_csv(GridField(g, rng.normal(size=g.shape)), path)
    return path


def test_norms(tmp_path, rng, capsys):
    path = _field_csv(tmp_path, rng)
    assert main(["norms", str(path), "2.5", "4"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["lower_bound"] <= rep["inf_decomp"] <= rep["upper_bound_sum"]
    assert main(["norms", str(path), "4", "2.5"]) == 1


def test_rearrange(tmp_path, rng, capsys):
    path = _field_csv(tmp_path, rng)
    assert main(["rearrange", str(path), "--s", "0.3"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["seminorm_sq_rearranged"] <= rep["seminorm_sq"]
    v = read_field_csv(rep["output"])
    u = read_field_csv(path)
    assert np.array_equal(np.sort(v.values.ravel()), np.sort(np.abs(u.values).ravel()))


def test_malformed_csv_reports_line(tmp_path, rng, capsys):
    path = _field_csv(tmp_path, rng)
    lines = path.read_text().splitlines()
    lines[5] = lines[5].rsplit(",", 1)[0] + ",oops"
    path.write_text("\n".join(lines) + "\n")
    assert main(["norms", str(path), "2.5", "4"]) == 1
    assert "line 6" in capsys.readouterr().err
    assert main(["rearrange", str(tmp_path / "missing.csv")]) == 1


def test_propsuite_deterministic(capsys):
    assert main(["propsuite", "42"]) == 0
    first = capsys.readouterr().out
    assert main(["propsuite", "42"]) == 0
    assert capsys.readouterr().out == first
    assert first.rstrip().endswith("propsuite OK")


def test_threads_env(monkeypatch):
    monkeypatch.setenv("FRGS_THREADS", "x")
    assert main(["check", "2.5", "4", "2", "0.5"]) == 1
