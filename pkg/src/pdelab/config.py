from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

# =========================== Config / Defaults ================================
CONF_FILE = Path(os.environ.get("PDELAB_CONF", "~/.config/pdelab/pdelab.conf")).expanduser()
OUTPUT_DIR = Path(os.environ.get("PDELAB_OUTPUT_DIR", "pdelab-out"))
UMASK = 0o22

# Module-level configuration cache; populated via _apply_conf()
CONF: Dict[str, str] = {}
BLOWUP_THRESHOLD = 1e8
QUAD_TOL = 1e-10
QUAD_LIMIT = 200
SERIES_TERMS = 200
THETA_SAMPLES = 1024
K_SAMPLES = 512
SL_STEPS = 2000
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
LOG_LEVEL = "WARNING"

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

logger = logging.getLogger(__name__)


def load_conf(path: Path) -> Dict[str, str]:
    """Parse a flat ``KEY=VALUE`` file; missing files yield an empty mapping."""
    path = Path(path)
    if not path.exists():
        return {}
    out: Dict[str, str] = {}
    for ln in path.read_text(encoding="utf-8").splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if "=" in ln:
            k, v = ln.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _get_float(key: str, default: float, *, positive: bool = True) -> float:
    raw = CONF.get(key)
    if raw is None:
        return default
    try:
        val = float(raw)
    except ValueError:
        logger.debug("ignoring malformed %s=%r", key, raw)
        return default
    if positive and not val > 0:
        return default
    return val


def _get_int(key: str, default: int, *, minimum: int = 1) -> int:
    raw = CONF.get(key)
    if raw is None:
        return default
    try:
        return max(minimum, int(raw))
    except ValueError:
        logger.debug("ignoring malformed %s=%r", key, raw)
        return default


def _apply_conf(conf: Mapping[str, str]) -> None:
    global CONF, BLOWUP_THRESHOLD, QUAD_TOL, QUAD_LIMIT, SERIES_TERMS
    global THETA_SAMPLES, K_SAMPLES, SL_STEPS, NEWTON_TOL, NEWTON_MAX_ITER
    global LOG_LEVEL, UMASK, OUTPUT_DIR

    CONF = {k.strip().upper(): str(v).strip() for k, v in conf.items()}

    BLOWUP_THRESHOLD = _get_float("BLOWUP_THRESHOLD", 1e8)
    QUAD_TOL = _get_float("QUAD_TOL", 1e-10)
    QUAD_LIMIT = _get_int("QUAD_LIMIT", 200, minimum=50)
    SERIES_TERMS = _get_int("SERIES_TERMS", 200)
    THETA_SAMPLES = _get_int("THETA_SAMPLES", 1024, minimum=64)
    K_SAMPLES = _get_int("K_SAMPLES", 512, minimum=256)
    SL_STEPS = _get_int("SL_STEPS", 2000, minimum=100)
    NEWTON_TOL = _get_float("NEWTON_TOL", 1e-10)
    NEWTON_MAX_ITER = _get_int("NEWTON_MAX_ITER", 50)

    level = CONF.get("LOG_LEVEL", "WARNING").upper()
    LOG_LEVEL = level if level in _LOG_LEVELS else "WARNING"

    try:
        UMASK = int(CONF.get("UMASK", "0o22"), 0) & 0o777
    except ValueError:
        UMASK = 0o22

    out_dir = CONF.get("OUTPUT_DIR")
    if out_dir:
        OUTPUT_DIR = Path(out_dir).expanduser()


def _normalize_key(key: str) -> str | None:
    cleaned = key.strip()
    if not cleaned:
        return None
    normalized = cleaned.upper()
    if not all(ch.isalnum() or ch == "_" for ch in normalized):
        return None
    return normalized


def save_conf(settings: Mapping[str, object], path: Path = CONF_FILE) -> None:
    """Merge *settings* into the file at *path* and reload the globals from it."""
    path = Path(path)
    merged = load_conf(path)
    for key, value in settings.items():
        norm_key = _normalize_key(key)
        if norm_key is None:
            continue
        merged[norm_key] = "" if value is None else str(value).strip()

    lines = ["# pdelab configuration file"]
    lines.extend(f"{key}={merged[key]}" for key in sorted(merged))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    _apply_conf(load_conf(path))




# =========================== Run configuration ================================


class ConfigError(ValueError):
    """Malformed or inconsistent run parameter; ``key`` names the culprit."""

    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key


@dataclass
class RunConfig:
    """Flat parameters of one command run.

    Values come from a ``key=value`` file, ``--set`` overrides and dedicated
    flags, later sources winning. Typed getters convert on access, record the
    key as used and raise :class:`ConfigError` naming the key on bad input.
    """

    command: str
    params: Dict[str, str] = field(default_factory=dict)
    out_dir: Path = field(default_factory=lambda: OUTPUT_DIR)
    output_times: Tuple[float, ...] = ()
    seed: int = 0
    _used: Set[str] = field(default_factory=set, repr=False)

    @classmethod
    def build(
        cls,
        command: str,
        *,
        file: Optional[Path] = None,
        overrides: Sequence[str] = (),
        flags: Optional[Mapping[str, object]] = None,
        out_dir: Optional[Path] = None,
    ) -> "RunConfig":
        params: Dict[str, str] = {}
        if file is not None:
            file = Path(file)
            if not file.exists():
                raise ConfigError("config", f"{file} does not exist")
            params.update(load_conf(file))
        for item in overrides:
            key, sep, value = item.partition("=")
            if not sep or not key.strip():
                raise ConfigError(item, "expected key=value")
            params[key.strip()] = value.strip()
        for key, value in (flags or {}).items():
            if value is not None:
                params[key] = str(value)

        times: Tuple[float, ...] = ()
        raw = params.pop("times", "")
        if raw:
            try:
                times = tuple(float(v) for v in raw.split(",") if v.strip())
            except ValueError:
                raise ConfigError("times", f"expected comma-separated numbers, got {raw!r}") from None
        try:
            seed = int(params.pop("seed", "0"))
        except ValueError:
            raise ConfigError("seed", "expected an integer") from None
        target = params.pop("out", None)
        root = Path(target) if target else (Path(out_dir) if out_dir else OUTPUT_DIR / command.replace(" ", "-"))
        return cls(command, params, root, times, seed)

    def _raw(self, key: str) -> Optional[str]:
        self._used.add(key)
        return self.params.get(key)

    def has(self, key: str) -> bool:
        return key in self.params

    def get_str(self, key: str, default: str) -> str:
        raw = self._raw(key)
        return default if raw is None else raw

    def get_float(self, key: str, default: float) -> float:
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            val = float(raw)
        except ValueError:
            raise ConfigError(key, f"expected a number, got {raw!r}") from None
        if not math.isfinite(val):
            raise ConfigError(key, f"expected a finite number, got {raw!r}")
        return val

    def get_int(self, key: str, default: int, *, minimum: Optional[int] = None) -> int:
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            val = int(raw)
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {raw!r}") from None
        if minimum is not None and val < minimum:
            raise ConfigError(key, f"must be at least {minimum}, got {val}")
        return val

    def get_floats(self, key: str, default: Sequence[float]) -> Tuple[float, ...]:
        raw = self._raw(key)
        if raw is None:
            return tuple(default)
        try:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        except ValueError:
            raise ConfigError(key, f"expected comma-separated numbers, got {raw!r}") from None

    def get_choice(self, key: str, default: str, choices: Sequence[str]) -> str:
        raw = self._raw(key)
        val = default if raw is None else raw
        if val not in choices:
            raise ConfigError(key, f"expected one of {', '.join(choices)}, got {val!r}")
        return val

    def get_profile(self, key: str, default: Optional[str]):
        from .profiles import ProfileError, parse_profile

        raw = self._raw(key)
        spec = default if raw is None else raw
        if spec is None or spec in ("", "none"):
            return None
        try:
            return parse_profile(spec)
        except ProfileError as exc:
            raise ConfigError(key, str(exc)) from None

    def exclusive(self, *keys: str) -> None:
        given = [k for k in keys if k in self.params]
        if len(given) > 1:
            raise ConfigError(given[1], f"conflicts with {given[0]}")

    def unused(self) -> List[str]:
        return sorted(k for k in self.params if k not in self._used)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "params": dict(sorted(self.params.items())),
            "times": list(self.output_times),
            "seed": self.seed,
        }


# Initialize globals on import
_apply_conf(load_conf(CONF_FILE))


__all__ = [
    "CONF_FILE",
    "OUTPUT_DIR",
    "UMASK",
    "CONF",
    "BLOWUP_THRESHOLD",
    "QUAD_TOL",
    "QUAD_LIMIT",
    "SERIES_TERMS",
    "THETA_SAMPLES",
    "K_SAMPLES",
    "SL_STEPS",
    "NEWTON_TOL",
    "NEWTON_MAX_ITER",
    "LOG_LEVEL",
    "ConfigError",
    "RunConfig",
    "load_conf",
    "save_conf",
]
