import json

import numpy as np
import pytest

from cigardeform import __version__, cli
from cigardeform import eigensolve as es


def run(*argv):
    return cli.main(list(argv))


def test_verify_writes_passing_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert run("verify", "--suite", "all", "--seed", "42", "--out", str(out)) == 0
    rep = json.loads(out.read_text(encoding="utf-8"))
    assert list(rep) == ["suite", "checks", "pass", "seed", "version"]
    assert rep["pass"] is True and rep["seed"] == 42 and rep["version"] == __version__
    assert [c["id"] for c in rep["checks"]] == sorted(c["id"] for c in rep["checks"])
    assert all(c["pass"] for c in rep["checks"])
    assert "PASS" in capsys.readouterr().out


def test_verify_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run("verify", "--suite", "liouville", "--seed", "5", "--out", str(p)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_numbers_carry_17_digits(tmp_path):
    out = tmp_path / "r.json"
    run("verify", "--suite", "geometry", "--out", str(out))
    text = out.read_text()
    rep = json.loads(text)
    v = rep["checks"][0]["max_rel_residual"]
    assert cli.fmt(v) in text


def test_verify_tol_scale_recorded(tmp_path):
    out = tmp_path / "r.json"
    assert run("verify", "--suite", "appendix", "--tol-scale", "2", "--out", str(out)) == 0
    rep = json.loads(out.read_text())
    assert rep["tol_scale"] == 2.0
    out2 = tmp_path / "r2.json"
    run("verify", "--suite", "appendix", "--out", str(out2))
    assert "tol_scale" not in json.loads(out2.read_text())


def test_verify_failure_exit_code(tmp_path):
    assert run("verify", "--suite", "geometry", "--tol-scale", "1e-30", "--out", str(tmp_path / "r.json")) == 1


@pytest.mark.parametrize("argv", [
    ("verify", "--suite", "nosuch"),
    ("verify", "--tol-scale", "-1"),
    ("frobnicate",),
    ("verify", "-s", "all"),
    ("eval", "--model", "bryant", "--quantity", "gauss", "--at", "1,0"),
    ("eval", "--model", "cigar3d", "--quantity", "gauss", "--at", "1,0,0"),
    ("eval", "--model", "cigar3d", "--quantity", "ricci", "--at", "1,0"),
    ("eval", "--model", "cigar3d", "--quantity", "ricci", "--at", "2.5,0,0"),
    ("eval", "--model", "cigar3d", "--quantity", "ricci", "--at", "a,b,c"),
    ("eval", "--model", "sigma", "--quantity", "soliton-residual", "--at", "0,1"),
    ("solve", "--h", "0.07", "--out", "x.csv"),
    ("solve", "--bc", "zero", "--out", "x.csv"),
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(*argv) == 2
    assert capsys.readouterr().err.strip()


def test_eval_soliton_residual(capsys):
    assert run("eval", "--model", "cigar3d", "--quantity", "soliton-residual", "--at", "1.0,0.0,0.0") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["eq_residual"] <= 1e-12 and out["bianchi_residual"] <= 1e-12


def test_eval_quantities(capsys):
    run("eval", "--model", "cigar2d", "--quantity", "gauss", "--at", "1,0")
    assert json.loads(capsys.readouterr().out)["gauss"] == pytest.approx(3 / 8)
    run("eval", "--model", "cigar3d", "--quantity", "christoffel", "--at", "1,0,0")
    gamma = np.array(json.loads(capsys.readouterr().out)["gamma"])
    assert gamma.shape == (3, 3, 3) and gamma[0, 0, 0] == pytest.approx(2 / 3)
    run("eval", "--model", "cigar3d", "--quantity", "sectional", "--at", "1,0,0")
    assert json.loads(capsys.readouterr().out)["sectional"]["r,theta"] == pytest.approx(3 / 8)
    run("eval", "--model", "sigma", "--quantity", "riemann", "--at", "0,1")
    assert np.array(json.loads(capsys.readouterr().out)["riemann"]).shape == (2, 2, 2, 2)
    assert run("eval", "--model", "appendix-demo", "--quantity", "ricci", "--at", "0,0.5,1.5") == 0
    assert np.all(np.isfinite(json.loads(capsys.readouterr().out)["ricci"]))


def test_solve_grid_and_report(tmp_path):
    out, rep = tmp_path / "w.csv", tmp_path / "w.json"
    assert run("solve", "--xi-max", "6", "--x-max", "4", "--h", "0.05", "--out", str(out),
               "--report", str(rep)) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "xi,x,value"
    assert len(lines) - 1 == 19481
    grid = es.HalfStripGrid(6, 4, 0.05)
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:121, 1], -4.0)  # x-major: xi varies fastest
    np.testing.assert_allclose(data[:121, 0], grid.xi, rtol=0, atol=1e-15)
    W, _ = es.solve_dirichlet(grid, es.w0_boundary(grid), zero_wall=True)
    assert np.abs(cli.read_grid(str(out), grid).values - W.values).max() <= 1e-12
    report = json.loads(rep.read_text())
    assert report["kernel"] in ("compiled", "python")
    assert report["reduction_policy"] == es.REDUCTION_POLICY
    assert report["relative_error"] < 1e-4 and report["min_slack"] > 0


def test_solve_is_reproducible(tmp_path):
    paths = [(tmp_path / f"w{k}.csv", tmp_path / f"r{k}.json") for k in range(2)]
    for g, r in paths:
        assert run("solve", "--h", "0.1", "--method", "direct", "--out", str(g), "--report", str(r)) == 0
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()


def test_solve_nonconvergence_exit_1(tmp_path, monkeypatch):
    monkeypatch.setattr(es.SolverConfig, "iteration_budget", lambda self, grid: 2)
    assert run("solve", "--h", "0.1", "--out", str(tmp_path / "w.csv")) == 1


def test_solve_unwritable_path():
    assert run("solve", "--h", "0.1", "--out", "/nonexistent-dir/w.csv") == 2


def _nodes(tmp_path, text):
    p = tmp_path / "nodes.csv"
    p.write_text(text)
    return str(p)


def _read(path):
    lines = open(path).read().splitlines()
    assert lines[0] == "xi,x,value"
    return np.array([[float(t) for t in ln.split(",")] for ln in lines[1:]])


def test_transform_directions(tmp_path):
    src = _nodes(tmp_path, "fixture,xi,x\nvlog,0.5,0.0\nvlog,1.5,2.0\ngauge-cos,1.0,0.3\ndemo,2.0,-1.0\n")
    got = {}
    for d in cli.DIRECTIONS:
        out = tmp_path / f"{d}.csv"
        assert run("transform", "--grid", src, "--direction", d, "--out", str(out)) == 0
        got[d] = _read(out)
    np.testing.assert_allclose(got["y2w"][:, 2], got["v2w"][:, 2], rtol=1e-10, atol=1e-12)
    from cigardeform.liouville import w0_kernel
    np.testing.assert_allclose(got["v2w"][:2, 2], w0_kernel(np.array([0.5, 1.5])), rtol=1e-10)
    assert abs(got["v2w"][2, 2]) < 1e-12  # gauge field has no W
    assert np.all(got["v2y"][:, :2] == got["v2w"][:, :2])


@pytest.mark.parametrize("text", [
    "xi,x,value\n0.5,0.0,1.0\n",          # free-form samples
    "fixture,xi,x\nbryant,0.5,0.0\n",     # unknown field
    "fixture,xi\nvlog,0.5\n",             # missing coordinate
    "fixture,xi,x\nvlog,0.0,0.0\n",       # on the wall
    "fixture,xi,x\nvlog,abc,0.0\n",
    "fixture,xi,x\n",
])
def test_transform_rejects_bad_input(tmp_path, text):
    assert run("transform", "--grid", _nodes(tmp_path, text), "--direction", "v2y") == 2


def test_transform_missing_file():
    assert run("transform", "--grid", "/no/such.csv", "--direction", "v2y") == 2


def test_to_json_formatting():
    s = cli.to_json({"a": 0.1, "b": [1, 2.5], "c": True, "d": float("nan"), "e": "δK"})
    assert json.loads(s) == {"a": 0.1, "b": [1, 2.5], "c": True, "d": None, "e": "δK"}
    assert "0.10000000000000001" in s


def test_module_entry_point():
    import subprocess
    import sys

    p = subprocess.run([sys.executable, "-m", "cigardeform", "eval", "--model", "cigar2d", "--quantity",
                        "gauss", "--at", "1,0"], capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["gauss"] == pytest.approx(0.375)
