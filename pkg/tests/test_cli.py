import json

import numpy as np
import pytest

from ymtorus.cli import main
from ymtorus.cochain import TorusGrid, deserialize
from ymtorus.exterior_calc import norm_sq
from ymtorus.yang_mills import Connection, curvature


@pytest.fixture
def conn_file(tmp_path):
    A = Connection.random(TorusGrid(2, 2), seed=11, scale=0.3)
    path = tmp_path / "conn.json"
    path.write_text(A.to_json(), encoding="utf-8")
    return path, A


@pytest.fixture
def zero_file(tmp_path):
    z = Connection.zero(TorusGrid(2, 2))
    path = tmp_path / "zero.json"
    path.write_text(z.to_json(), encoding="utf-8")
    return path


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_verify_small_run_passes(tmp_path, capsys):
    out = tmp_path / "v"
    code = main(
        ["verify", "--grids", "2x2", "--trials", "3", "--seed", "1", "--out", str(out)]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "verification PASSED" in text
    report = read_json(out / "verify_report.json")
    assert report["passed"] is True
    manifest = read_json(out / "manifest.json")
    assert manifest["command"] == "verify"
    assert set(manifest) == {
        "command", "config", "seed", "version", "backend", "deterministic", "timestamp",
    }


def test_verify_zero_trials_warns(capsys):
    assert main(["verify", "--grids", "2x2", "--trials", "0"]) == 0
    assert "no trials" in capsys.readouterr().out


def test_verify_corrupted_star_fails_naming_invariant(capsys):
    code = main(["verify", "--grids", "2x2", "--trials", "2", "--corrupt", "star"])
    assert code == 1
    captured = capsys.readouterr()
    assert "star_inv_star_identity" in captured.out + captured.err


def test_verify_rerun_from_manifest_bitwise(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert (
        main(
            [
                "verify", "--grids", "2x2,3x5", "--trials", "2", "--seed", "7",
                "--deterministic", "--out", str(out1),
            ]
        )
        == 0
    )
    assert (
        main(["verify", "--from-manifest", str(out1 / "manifest.json"), "--out", str(out2)])
        == 0
    )
    for name in ("verify_report.json", "manifest.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_curvature_command(tmp_path, conn_file):
    path, A = conn_file
    out = tmp_path / "c"
    assert main(["curvature", "--input", str(path), "--out", str(out)]) == 0
    F_file = deserialize((out / "curvature.json").read_text(encoding="utf-8"))
    F = curvature(A)
    np.testing.assert_array_equal(F_file.coeffs, F.form.coeffs)
    diag = read_json(out / "diagnostics.json")
    assert diag["norm_sq"] == norm_sq(F.form)
    assert diag["max_su2_deviation"] == F.su2_deviation_max


def test_curvature_zero_connection(tmp_path, zero_file):
    out = tmp_path / "c0"
    assert main(["curvature", "--input", str(zero_file), "--out", str(out)]) == 0
    diag = read_json(out / "diagnostics.json")
    assert diag["norm_sq"] == 0.0 and diag["max_su2_deviation"] == 0.0


def test_curvature_commuting_constant_fixture(tmp_path):
    coords = np.zeros((2, 2, 2, 3))
    coords[:, :, 0, 0] = 0.3
    coords[:, :, 1, 0] = 0.5
    A = Connection.from_coords(TorusGrid(2, 2), coords)
    path = tmp_path / "comm.json"
    path.write_text(A.to_json(), encoding="utf-8")
    out = tmp_path / "cc"
    assert main(["curvature", "--input", str(path), "--out", str(out)]) == 0
    assert read_json(out / "diagnostics.json")["norm_sq"] == 0.0


def test_residual_command_zero(tmp_path, zero_file):
    out = tmp_path / "r0"
    assert main(["residual", "--input", str(zero_file), "--out", str(out)]) == 0
    res = deserialize((out / "residual.json").read_text(encoding="utf-8"))
    assert res.max_abs() == 0.0
    summary = read_json(out / "summary.json")
    assert summary["max_abs"] == 0.0 and summary["norm_sq"] == 0.0


def test_residual_command_matches_library(tmp_path, conn_file):
    from ymtorus.yang_mills import residual_dstar

    path, A = conn_file
    out = tmp_path / "r"
    assert (
        main(["residual", "--input", str(path), "--equation", "dstar", "--out", str(out)])
        == 0
    )
    res = deserialize((out / "residual.json").read_text(encoding="utf-8"))
    np.testing.assert_array_equal(res.coeffs, residual_dstar(A).coeffs)


def test_matrix_form_command(tmp_path, conn_file, capsys):
    path, A = conn_file
    out = tmp_path / "m"
    assert main(["matrix-form", "--input", str(path), "--out", str(out)]) == 0
    assert "consistent" in capsys.readouterr().out
    payload = read_json(out / "matrix_form.json")
    assert payload["D"][0] == [-1, 1, 0, 0]
    assert payload["consistency"]["dstar"]["consistent"] is True
    assert payload["consistency"]["delta"]["consistent"] is True
    assert len(payload["A"]) == 8 and len(payload["F"]) == 4
    assert len(payload["residual_delta"]) == 8


def test_matrix_form_rejects_other_grids(tmp_path):
    A = Connection.random(TorusGrid(3, 2), seed=2)
    path = tmp_path / "c32.json"
    path.write_text(A.to_json(), encoding="utf-8")
    assert main(["matrix-form", "--input", str(path), "--out", str(tmp_path / "x")]) == 2


def test_solve_command_and_rerun(tmp_path):
    out1 = tmp_path / "s1"
    out2 = tmp_path / "s2"
    code = main(
        [
            "solve", "--grid", "2x2", "--seed", "1", "--deterministic",
            "--out", str(out1),
        ]
    )
    assert code == 0
    trace = (out1 / "trace.csv").read_text(encoding="utf-8")
    assert trace.startswith("iter,objective,grad_norm,step\n")
    A = Connection.from_json((out1 / "connection.json").read_text(encoding="utf-8"))
    assert A.grid == TorusGrid(2, 2)
    manifest = read_json(out1 / "manifest.json")
    assert manifest["config"]["seed"] == 1 and manifest["deterministic"] is True
    assert (
        main(["solve", "--from-manifest", str(out1 / "manifest.json"), "--out", str(out2)])
        == 0
    )
    for name in ("trace.csv", "connection.json", "manifest.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_solve_with_config_file(tmp_path):
    cfg = {"n": 2, "m": 2, "seed": 4, "max_iters": 5, "tol_residual": 1e-30}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg), encoding="utf-8")
    out = tmp_path / "s"
    assert main(["solve", "--config", str(cfg_path), "--out", str(out)]) == 0
    lines = (out / "trace.csv").read_text(encoding="utf-8").strip().split("\n")
    assert len(lines) == 7  # header + iterations 0..5
    # flag overrides config file
    out2 = tmp_path / "s2"
    assert (
        main(["solve", "--config", str(cfg_path), "--max-iters", "2", "--out", str(out2)])
        == 0
    )
    assert len((out2 / "trace.csv").read_text(encoding="utf-8").strip().split("\n")) == 4


def test_exit_codes(tmp_path):
    missing = tmp_path / "missing.json"
    assert main(["curvature", "--input", str(missing), "--out", str(tmp_path / "o")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("not json", encoding="utf-8")
    assert main(["residual", "--input", str(bad), "--out", str(tmp_path / "o2")]) == 3
    assert main(["solve", "--grid", "2x2", "--tol", "-1", "--out", str(tmp_path / "o3")]) == 2
    cfg = tmp_path / "badcfg.json"
    cfg.write_text(json.dumps({"unknown_key": 1}), encoding="utf-8")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o4")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--grid", "2x2", "--equation", "weird", "--out", "x"])
    assert exc.value.code == 2


def test_diagnostics_command(tmp_path):
    out = tmp_path / "d"
    assert (
        main(
            [
                "diagnostics", "--grids", "2x2", "--trials", "4", "--seed", "3",
                "--out", str(out),
            ]
        )
        == 0
    )
    lines = (out / "diagnostics.csv").read_text(encoding="utf-8").strip().split("\n")
    assert lines[0] == "grid,trial,su2_deviation_max_F,re_inner_laplacian,im_inner_laplacian"
    assert len(lines) == 5
    for line in lines[1:]:
        grid, trial, dev, re_part, im_part = line.split(",")
        assert grid == "2x2"
        assert float(dev) >= 0.0
        float(re_part), float(im_part)


def test_only_one_manifest_per_output_set(tmp_path, conn_file):
    path, _ = conn_file
    out = tmp_path / "m"
    main(["matrix-form", "--input", str(path), "--out", str(out)])
    manifests = list(out.glob("*manifest*"))
    assert len(manifests) == 1
