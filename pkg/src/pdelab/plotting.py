"""gnuplot scripts for run manifests.

Scripts only reference the CSV files next to the manifest; nothing here runs
gnuplot. Every script renders PNG files so it can be fed to ``gnuplot`` in a
batch job.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import List, Optional, Union

from . import atomic_io

logger = logging.getLogger(__name__)

_PREAMBLE = [
    "set datafile separator ','",
    "set key autotitle columnhead",
    "set terminal pngcairo size 900,600",
    "set grid",
]


def _quote(name: str) -> str:
    return "'" + name.replace("'", "''") + "'"


def evolution_script(manifest: dict) -> str:
    """One ``plot`` block per snapshot, overlaying the oracle when present."""
    lines = list(_PREAMBLE)
    lines.append("set xlabel 'x'")
    lines.append("set ylabel 'u'")
    oracle = manifest.get("oracle_files") or []
    for idx, (t, name) in enumerate(zip(manifest.get("times", []), manifest.get("files", []))):
        lines.append("")
        lines.append(f"set output {_quote(f'snapshot_{idx:04d}.png')}")
        lines.append(f"set title 't = {t:.6g}'")
        parts = [f"{_quote(name)} using 1:2 with lines lw 2 title 'numeric'"]
        if idx < len(oracle):
            parts.append(f"{_quote(oracle[idx])} using 1:2 with lines dt 2 title 'oracle'")
        lines.append("plot " + ", \\\n     ".join(parts))
    if manifest.get("max_norm"):
        lines.extend(_max_norm_block(manifest["max_norm"]))
    return "\n".join(lines) + "\n"


def _max_norm_block(name: str) -> List[str]:
    return [
        "",
        "set output 'max_norm.png'",
        "set title 'max |u| per step'",
        "set xlabel 'step'",
        "set ylabel 'max |u|'",
        "set logscale y",
        f"plot {_quote(name)} using 1:2 with lines lw 2 notitle",
        "unset logscale y",
    ]


def characteristics_script(manifest: dict) -> str:
    """Base characteristics in the (x, t) plane; curves are blank-line separated."""
    lines = list(_PREAMBLE)
    lines += [
        "",
        "set output 'characteristics.png'",
        f"set title {_quote('base characteristics: ' + manifest.get('problem', ''))}",
        "set xlabel 'x'",
        "set ylabel 't'",
        "unset key",
        f"plot {_quote(manifest['polylines'])} using 1:2 with lines lc rgb '#3060a0'",
    ]
    return "\n".join(lines) + "\n"


def series_script(manifest: dict) -> str:
    """Generic ``x y1 y2 ...`` tables, one plot per entry of ``tables``."""
    lines = list(_PREAMBLE)
    for entry in manifest.get("tables", []):
        name, columns = entry["file"], int(entry.get("columns", 2))
        stem = Path(name).stem
        lines.append("")
        lines.append(f"set output {_quote(stem + '.png')}")
        lines.append(f"set title {_quote(entry.get('title', stem))}")
        if entry.get("logy"):
            lines.append("set logscale y")
        parts = [f"{_quote(name)} using 1:{c} with lines lw 2" for c in range(2, columns + 1)]
        lines.append("plot " + ", \\\n     ".join(parts))
        if entry.get("logy"):
            lines.append("unset logscale y")
    return "\n".join(lines) + "\n"


def plot_script(manifest: dict) -> str:
    if manifest.get("polylines"):
        return characteristics_script(manifest)
    if manifest.get("files"):
        return evolution_script(manifest)
    if manifest.get("tables"):
        return series_script(manifest)
    if manifest.get("max_norm"):
        return "\n".join(_PREAMBLE + _max_norm_block(manifest["max_norm"])) + "\n"
    raise ValueError(f"manifest of {manifest.get('command', '?')!r} has nothing to plot")


def write_plot_script(manifest_path: Union[str, Path], out: Optional[Union[str, Path]] = None) -> Path:
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    target = Path(out) if out else manifest_path.with_name("plot.gp")
    logger.info("plot script for %s -> %s", manifest_path, target)
    return atomic_io.safe_write(target, plot_script(manifest))


__all__ = [
    "evolution_script",
    "characteristics_script",
    "series_script",
    "plot_script",
    "write_plot_script",
]
