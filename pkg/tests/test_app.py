import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.app import build_parser, main


def _summary(out):
    return json.loads((out / "summary.json").read_text(encoding="utf-8"))


def test_solve_heat_against_series_passes(tmp_path):
    out = tmp_path / "heat"
    rc = main(["solve", "heat", "--quiet", "--out", str(out), "--oracle", "heat-series", "--tol", "0.02"])
    assert rc == 0
    summary = _summary(out)
    assert summary["passed"] is True
    assert summary["notes"]["max_error"] < 0.02
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["files"][0] == "snapshot_0000.csv"
    assert len(manifest["oracle_files"]) == len(manifest["files"])
    assert (out / "config.json").exists()


def test_failed_gate_exits_with_one(tmp_path, capsys):
    out = tmp_path / "heat"
    rc = main(["solve", "heat", "--out", str(out), "--oracle", "heat-series", "--tol", "1e-9"])
    assert rc == 1
    failures = json.loads(capsys.readouterr().out)
    assert failures[0]["passed"] is False
    assert _summary(out)["passed"] is False


def test_bad_profile_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["solve", "heat", "--out", str(tmp_path), "--phi", "wobble(1)"])
    assert excinfo.value.code == 2


def test_bad_override_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["solve", "heat", "--out", str(tmp_path), "--set", "novalue"])
    assert excinfo.value.code == 2


def test_subcommand_is_required():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


def test_unstable_wave_run_records_blow_up(tmp_path):
    out = tmp_path / "wave"
    rc = main(["solve", "wave", "--out", str(out), "--s", "1.1", "--steps", "300", "--set", "expect_blow_up=1"])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["blow_up"] is not None
    assert manifest["blow_up"]["step"] <= 300


def test_mesh_ratio_and_time_step_conflict(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["solve", "wave", "--out", str(tmp_path), "--s", "0.5", "--k", "0.01"])
    assert excinfo.value.code == 2


def test_laplace_compare_gates(tmp_path):
    out = tmp_path / "laplace"
    rc = main(["solve", "laplace", "--out", str(out), "--method", "compare", "--boundary", "harmonic-xy",
               "--set", "export_matrix=1"])
    assert rc == 0
    names = {g["name"] for g in _summary(out)["gates"]}
    assert "gauss-seidel / jacobi iterations" in names
    assert (out / "residuals_jacobi.csv").exists()
    assert (out / "laplace.mtx").exists()


def test_stability_verdict_is_printed(tmp_path, capsys):
    rc = main(["stability", "--out", str(tmp_path), "--scheme", "heat-explicit", "--s", "0.6",
               "--expect", "unstable"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["stable"] is False
    assert payload["classification"] == "unstable"


def test_stability_threshold_bracket(tmp_path, capsys):
    rc = main(["stability", "--out", str(tmp_path), "--scheme", "wave-leapfrog", "--threshold", "0.5,2"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["threshold"] == pytest.approx(1.0, abs=1e-4)


def test_pde_stability_for_klein_gordon(tmp_path, capsys):
    rc = main(["stability", "--out", str(tmp_path), "--pde", "klein-gordon"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["mode_type"] == "conservative"
    assert payload["dispersive"] is True


def test_classify_wave_equation(tmp_path, capsys):
    rc = main(["classify", "--out", str(tmp_path), "--coeffs", "1,0,-1,0,0,0", "--expect", "hyperbolic"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["kind"] == "hyperbolic"
    assert len(payload["characteristics"]) == 2
    assert payload["canonical"]["form"] == "u_xi_eta"


def test_classify_matrix_file(tmp_path, capsys):
    form = tmp_path / "form.txt"
    form.write_text("1 0 0\n0 1 0\n0 0 -1\n", encoding="utf-8")
    rc = main(["classify", "--out", str(tmp_path / "out"), "--matrix", str(form)])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "hyperbolic"


def test_shock_time_of_tent(tmp_path, capsys):
    rc = main(["shock-time", "--out", str(tmp_path), "--phi", "tent", "--expected", "1"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["t_star"] == pytest.approx(1.0)


def test_characteristics_then_plot(tmp_path):
    out = tmp_path / "chars"
    assert main(["characteristics", "--out", str(out), "--model", "transport", "--phi", "gaussian(1,1,0)"]) == 0
    assert (out / "characteristics.csv").read_text(encoding="utf-8").startswith("x,t\n")
    assert main(["plot", str(out / "manifest.json")]) == 0
    script = (out / "plot.gp").read_text(encoding="utf-8")
    assert "characteristics.png" in script


def test_oracle_table_then_plot(tmp_path):
    out = tmp_path / "oracle"
    assert main(["oracle", "heat-series", "--out", str(out), "--N", "20", "--K", "50"]) == 0
    assert (out / "oracle.csv").read_text(encoding="utf-8").startswith("x,u(t=0.01),u(t=0.1)\n")
    target = tmp_path / "oracle.gp"
    assert main(["plot", str(out / "manifest.json"), "--output", str(target)]) == 0
    assert "oracle.png" in target.read_text(encoding="utf-8")


def test_sturm_liouville_oracle(tmp_path):
    out = tmp_path / "sl"
    assert main(["oracle", "sturm-liouville", "--out", str(out), "--set", "count=3"]) == 0
    assert _summary(out)["passed"] is True


def test_nonlinear_heat_single_mode_saturates(tmp_path):
    out = tmp_path / "nl"
    rc = main(["nonlinear-heat", "--out", str(out), "--K", "1", "--t-end", "30", "--set", "tol=1e-4"])
    assert rc == 0
    assert (out / "trajectory.csv").exists()


def test_resonance_sweep_finds_natural_frequency(tmp_path):
    out = tmp_path / "res"
    rc = main(["resonance", "--out", str(out), "--lam", "4", "--omegas", "1,1.5,2,2.5,3", "--t-end", "40"])
    assert rc == 0
    assert _summary(out)["notes"]["peak_omega"] == 2.0


def test_parser_lists_projects():
    parser = build_parser()
    args = parser.parse_args(["project2", "--quiet"])
    assert args.project == "project2"
    assert args.quiet
