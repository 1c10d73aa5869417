from __future__ import annotations

import json
import os
import sys

import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab import atomic_io, config


@pytest.fixture
def umask_077(monkeypatch):
    monkeypatch.setattr(config, "UMASK", 0o077)
    yield config


def test_safe_write_respects_umask(umask_077, tmp_path):
    target = tmp_path / "data" / "value.txt"
    previous_umask = os.umask(0o002)
    try:
        atomic_io.safe_write(target, "hello world\n")
    finally:
        os.umask(previous_umask)

    assert target.read_text(encoding="utf-8") == "hello world\n"
    mode = target.stat().st_mode & 0o777
    assert mode == 0o666 & ~umask_077.UMASK

    leftovers = list(target.parent.glob(".*.tmp"))
    assert leftovers == []


def test_write_json_formats_output(monkeypatch, tmp_path):
    monkeypatch.setattr(config, "UMASK", 0o022)
    target = tmp_path / "data.json"
    atomic_io.write_json(target, {"b": 2, "a": np.float64(1.5), "c": np.arange(2)})

    content = target.read_text(encoding="utf-8")
    assert content == '{\n  "a": 1.5,\n  "b": 2,\n  "c": [\n    0,\n    1\n  ]\n}\n'
    mode = target.stat().st_mode & 0o777
    assert mode == 0o666 & ~0o022


def test_dumps_encodes_complex_and_paths(tmp_path):
    payload = json.loads(atomic_io.dumps({"z": 1 + 2j, "p": tmp_path}))
    assert payload == {"z": [1.0, 2.0], "p": str(tmp_path)}
    with pytest.raises(TypeError):
        atomic_io.dumps({"s": {1, 2}})


def test_atomic_replace_leaves_target_untouched_on_error(tmp_path):
    target = tmp_path / "table.csv"
    target.write_text("old\n", encoding="utf-8")
    with pytest.raises(RuntimeError):
        with atomic_io.atomic_replace(target) as fh:
            fh.write("new\n")
            raise RuntimeError("boom")
    assert target.read_text(encoding="utf-8") == "old\n"
    assert list(tmp_path.glob(".*.tmp")) == []


def test_table_keeps_full_precision(tmp_path):
    x = np.array([0.1, 1.0 / 3.0, np.pi])
    path = atomic_io.write_table(tmp_path / "t.csv", ["x", "u"], [x, x * x])
    header, data = atomic_io.read_table(path)
    assert header == ["x", "u"]
    assert np.array_equal(data[:, 0], x)
    assert np.array_equal(data[:, 1], x * x)


def test_matrix_market_output(tmp_path):
    A = sp.csr_matrix(np.array([[4.0, -1.0], [-1.0, 4.0]]))
    path = atomic_io.write_matrix_market(tmp_path / "a.mtx", A, comment="test")
    assert path.read_text(encoding="utf-8").startswith("%%MatrixMarket")
    assert np.array_equal(scipy.io.mmread(str(path)).toarray(), A.toarray())
