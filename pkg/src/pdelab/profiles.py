"""Registry of named initial/boundary profiles usable from run configurations.

Profiles are written as ``name`` or ``name(arg, ...)``, e.g. ``gaussian(1,10,0)``
or ``sin(2)``. Every profile is vectorised and carries its derivative, kink
locations (quadrature breakpoints) and support when it is compact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np


class ProfileError(ValueError):
    def __init__(self, spec: str, reason: str):
        super().__init__(f"bad profile {spec!r}: {reason}")
        self.spec = spec


@dataclass(frozen=True)
class Profile:
    name: str
    f: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    df: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    kinks: Tuple[float, ...] = ()
    support: Optional[Tuple[float, float]] = None

    def __call__(self, x):
        return self.f(np.asarray(x, dtype=float))

    def derivative(self, x):
        return self.df(np.asarray(x, dtype=float))


def _gaussian(a: float = 1.0, b: float = 1.0, x0: float = 0.0) -> Profile:
    f = lambda x: a * np.exp(-b * (x - x0) ** 2)
    df = lambda x: -2.0 * b * (x - x0) * f(x)
    return Profile(f"gaussian({a:g},{b:g},{x0:g})", f, df)


def _hat() -> Profile:
    # 2x on [0, 1/2], 2(1-x) on [1/2, 1], zero outside
    f = lambda x: np.where((x >= 0) & (x <= 1), 1.0 - np.abs(2.0 * x - 1.0), 0.0)
    df = lambda x: np.where((x > 0) & (x < 1), np.where(x < 0.5, 2.0, -2.0), 0.0)
    return Profile("hat", f, df, kinks=(0.0, 0.5, 1.0), support=(0.0, 1.0))


def _tent() -> Profile:
    f = lambda x: np.maximum(1.0 - np.abs(x), 0.0)
    df = lambda x: np.where(np.abs(x) < 1, np.where(x < 0, 1.0, -1.0), 0.0)
    return Profile("tent", f, df, kinks=(-1.0, 0.0, 1.0), support=(-1.0, 1.0))


def _sin(m: float = 1.0, l: float = 1.0) -> Profile:
    w = np.pi * m / l
    return Profile(f"sin({m:g},{l:g})", lambda x: np.sin(w * x), lambda x: w * np.cos(w * x))


def _cos(m: float = 1.0, l: float = 1.0) -> Profile:
    w = np.pi * m / l
    return Profile(f"cos({m:g},{l:g})", lambda x: np.cos(w * x), lambda x: -w * np.sin(w * x))


def _const(v: float = 0.0) -> Profile:
    return Profile(
        f"const({v:g})",
        lambda x: np.full(np.shape(x), v, dtype=float),
        lambda x: np.zeros(np.shape(x)),
    )


def _heaviside(x0: float = 0.0) -> Profile:
    f = lambda x: np.where(x > x0, 1.0, np.where(x == x0, 0.5, 0.0))
    return Profile(f"heaviside({x0:g})", f, lambda x: np.zeros(np.shape(x)), kinks=(x0,))


def _sech() -> Profile:
    f = lambda x: 1.0 / np.cosh(x)
    return Profile("sech", f, lambda x: -np.tanh(x) / np.cosh(x))


def _runge() -> Profile:
    f = lambda x: 1.0 / (1.0 + x * x)
    return Profile("runge", f, lambda x: -2.0 * x / (1.0 + x * x) ** 2)


def _linear(m: float = 1.0, c: float = 0.0) -> Profile:
    return Profile(
        f"linear({m:g},{c:g})",
        lambda x: m * x + c,
        lambda x: np.full(np.shape(x), m, dtype=float),
    )


def _parabola() -> Profile:
    return Profile("parabola", lambda x: 1.0 - x * x, lambda x: -2.0 * x)


def _bump(x0: float = 0.0, r: float = 1.0) -> Profile:
    def f(x):
        z = (x - x0) / r
        with np.errstate(all="ignore"):
            return np.where(np.abs(z) < 1, np.exp(-1.0 / np.maximum(1.0 - z * z, 1e-300)), 0.0)

    def df(x):
        z = (x - x0) / r
        with np.errstate(all="ignore"):
            inside = np.abs(z) < 1
            q = np.maximum(1.0 - z * z, 1e-300)
            return np.where(inside, f(x) * (-2.0 * z / q ** 2) / r, 0.0)

    return Profile(f"bump({x0:g},{r:g})", f, df, support=(x0 - r, x0 + r))


REGISTRY: Dict[str, Callable[..., Profile]] = {
    "gaussian": _gaussian,
    "hat": _hat,
    "tent": _tent,
    "sin": _sin,
    "cos": _cos,
    "const": _const,
    "heaviside": _heaviside,
    "sech": _sech,
    "runge": _runge,
    "linear": _linear,
    "parabola": _parabola,
    "bump": _bump,
}

_SPEC_RE = re.compile(r"^\s*([a-z_][a-z0-9_]*)\s*(?:\((.*)\))?\s*$")


def parse_profile(spec: str) -> Profile:
    m = _SPEC_RE.match(spec)
    if m is None:
        raise ProfileError(spec, "expected name or name(arg, ...)")
    name, args = m.group(1), m.group(2)
    if name not in REGISTRY:
        raise ProfileError(spec, f"unknown profile; choose from {', '.join(sorted(REGISTRY))}")
    values = []
    if args and args.strip():
        try:
            values = [float(a) for a in args.split(",")]
        except ValueError:
            raise ProfileError(spec, "arguments must be numbers") from None
    try:
        return REGISTRY[name](*values)
    except TypeError:
        raise ProfileError(spec, "wrong number of arguments") from None


__all__ = ["Profile", "ProfileError", "REGISTRY", "parse_profile"]
