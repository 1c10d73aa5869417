"""Atomic file output for run artifacts: CSV grids, JSON manifests, Matrix Market."""

from __future__ import annotations

import io
import json
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence, Union

import numpy as np
import scipy.io

BytesLike = Union[bytes, bytearray, memoryview]
logger = logging.getLogger(__name__)

FLOAT_FMT = "%.17g"


def _coerce_bytes(data: Union[str, BytesLike], *, encoding: str = "utf-8") -> bytes:
    if isinstance(data, str):
        return data.encode(encoding)
    return bytes(data)


def _current_umask() -> int:
    from . import config
    return config.UMASK


def _finish(tmp_path: Path, target: Path, mode: int | None) -> None:
    applied_mode = (mode if mode is not None else 0o666) & ~_current_umask()
    try:
        os.chmod(tmp_path, applied_mode)
    except OSError as exc:
        logger.debug("failed chmod on temp file %s: %s", tmp_path, exc)
    os.replace(tmp_path, target)
    try:
        dir_fd = os.open(target.parent, os.O_RDONLY)
    except OSError:
        return
    try:
        os.fsync(dir_fd)
    except OSError:
        pass
    finally:
        os.close(dir_fd)


def safe_write(
    path: Union[str, Path],
    data: Union[str, BytesLike],
    *,
    mode: int | None = None,
    encoding: str = "utf-8",
) -> Path:
    """Atomically write *data* to *path*, creating parent directories."""

    payload = _coerce_bytes(data, encoding=encoding)
    target = Path(path).resolve()
    target.parent.mkdir(parents=True, exist_ok=True)

    fd, tmp_name = tempfile.mkstemp(dir=str(target.parent), prefix=f".{target.name}.", suffix=".tmp")
    tmp_path = Path(tmp_name)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        _finish(tmp_path, target, mode)
    finally:
        try:
            tmp_path.unlink()
        except FileNotFoundError:
            pass
    return target


@contextmanager
def atomic_replace(
    path: Union[str, Path],
    *,
    mode: int | None = None,
    open_mode: str = "w",
    encoding: str = "utf-8",
) -> Iterator[Any]:
    """Yield a writable handle that atomically replaces *path* on success."""

    target = Path(path).resolve()
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=str(target.parent), prefix=f".{target.name}.", suffix=".tmp")
    tmp_path = Path(tmp_name)
    try:
        kwargs = {} if "b" in open_mode else {"encoding": encoding, "newline": ""}
        with os.fdopen(fd, open_mode, **kwargs) as handle:
            yield handle
            handle.flush()
            os.fsync(handle.fileno())
        _finish(tmp_path, target, mode)
    finally:
        try:
            tmp_path.unlink()
        except FileNotFoundError:
            pass


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default)


def write_json(path: Union[str, Path], payload: Any) -> Path:
    return safe_write(path, dumps(payload) + "\n")


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_table(path: Union[str, Path], header: Sequence[str], columns: Iterable[Sequence[float]]) -> Path:
    """Write equally long numeric *columns* as CSV with full round-trip precision."""
    data = np.column_stack([np.asarray(col, dtype=float) for col in columns])
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    np.savetxt(buf, data, fmt=FLOAT_FMT, delimiter=",")
    return safe_write(path, buf.getvalue())


def read_table(path: Union[str, Path]) -> tuple[list[str], np.ndarray]:
    text = Path(path).read_text(encoding="utf-8")
    header, _, body = text.partition("\n")
    data = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
    return header.split(","), data


def write_matrix_market(path: Union[str, Path], matrix, comment: str = "") -> Path:
    buf = io.BytesIO()
    scipy.io.mmwrite(buf, matrix, comment=comment)
    return safe_write(path, buf.getvalue())


__all__ = [
    "BytesLike",
    "FLOAT_FMT",
    "safe_write",
    "atomic_replace",
    "dumps",
    "write_json",
    "write_table",
    "read_table",
    "write_matrix_market",
]
