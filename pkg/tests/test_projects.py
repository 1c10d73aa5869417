import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.config import RunConfig
from src.pdelab.projects import PROJECTS, Report


def test_report_gates(tmp_path):
    report = Report("demo", tmp_path)
    assert report.within("close", 1.0 + 1e-9, 1.0, 1e-6)
    assert not report.within("relative", 1.1, 1.0, 0.05, relative=True)
    assert report.below("small", 0.01, 0.1)
    report.table("t.csv", ["x", "y"], [[0.0, 1.0], [2.0, 3.0]], logy=True)
    assert not report.passed
    assert [f["name"] for f in report.failures()] == ["relative"]

    report.write(RunConfig("demo", {"a": "1"}))
    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert summary["passed"] is False
    assert len(summary["gates"]) == 3
    manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["tables"][0]["file"] == "t.csv"
    assert (tmp_path / "t.csv").read_text(encoding="utf-8").startswith("x,y\n")


def test_non_finite_gate_values_serialise(tmp_path):
    report = Report("demo", tmp_path)
    report.check("shock", False, float("inf"), "finite")
    assert report.failures()[0]["value"] == "inf"


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(PROJECTS))
def test_project_gates_pass(name, tmp_path):
    report = PROJECTS[name](RunConfig(name, out_dir=tmp_path))
    report.write()
    assert report.passed, report.failures()
    assert (tmp_path / "summary.json").exists()
