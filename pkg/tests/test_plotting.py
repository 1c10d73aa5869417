import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.plotting import plot_script, write_plot_script


def _evolution_manifest():
    return {
        "command": "solve heat",
        "times": [0.0, 0.05],
        "files": ["snapshot_0000.csv", "snapshot_0001.csv"],
        "oracle_files": ["oracle_0000.csv", "oracle_0001.csv"],
        "max_norm": "max_norm.csv",
    }


def test_evolution_script_overlays_oracle():
    script = plot_script(_evolution_manifest())
    assert script.startswith("set datafile separator ','")
    assert "set terminal pngcairo size 900,600" in script
    assert "set output 'snapshot_0000.png'" in script
    assert "set output 'snapshot_0001.png'" in script
    assert "'oracle_0001.csv' using 1:2 with lines dt 2 title 'oracle'" in script
    assert "set title 't = 0.05'" in script
    assert "set output 'max_norm.png'" in script
    assert "set logscale y" in script


def test_evolution_without_oracle_plots_numeric_only():
    manifest = _evolution_manifest()
    del manifest["oracle_files"]
    script = plot_script(manifest)
    assert "oracle" not in script
    assert script.count("title 'numeric'") == 2


def test_characteristics_take_priority():
    script = plot_script({"polylines": "characteristics.csv", "problem": "burgers", "files": ["x.csv"]})
    assert "set output 'characteristics.png'" in script
    assert "'characteristics.csv' using 1:2" in script
    assert "snapshot" not in script


def test_tables_get_one_plot_each():
    script = plot_script({
        "tables": [
            {"file": "errors.csv", "columns": 3, "title": "error", "logy": True},
            {"file": "o'dd.csv"},
        ]
    })
    assert "set output 'errors.png'" in script
    assert "'errors.csv' using 1:3 with lines lw 2" in script
    assert "unset logscale y" in script
    assert "'o''dd.csv' using 1:2" in script


def test_max_norm_only_manifest():
    script = plot_script({"max_norm": "max_norm.csv"})
    assert "set output 'max_norm.png'" in script


def test_nothing_to_plot_raises():
    with pytest.raises(ValueError):
        plot_script({"command": "stability"})


def test_write_plot_script_next_to_manifest(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps(_evolution_manifest()), encoding="utf-8")
    target = write_plot_script(manifest)
    assert target == (tmp_path / "plot.gp").resolve()
    assert "snapshot_0000.png" in target.read_text(encoding="utf-8")

    other = write_plot_script(manifest, tmp_path / "custom.gp")
    assert other == (tmp_path / "custom.gp").resolve()
    assert other.read_text(encoding="utf-8") == target.read_text(encoding="utf-8")
