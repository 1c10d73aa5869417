"""Stability analysis.

Two levels are covered: amplification polynomials of difference schemes under
a single Fourier mode ``u_j^n = ξ^n e^{iθj}``, and normal modes
``u = e^{ikx + λt}`` of constant-coefficient second-order equations
``A u_xx + 2B u_xt + C u_tt + D u_x + E u_t + F u = 0``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np
from scipy import optimize

from . import config

logger = logging.getLogger(__name__)

MODULUS_TOL = 1e-12
DOUBLE_ROOT_TOL = 1e-12
NEUTRAL = "neutrally stable"
ALGEBRAIC = "neutrally stable, algebraic growth possible"


class SymbolError(ValueError):
    pass


class DispersionError(ValueError):
    pass


@dataclass(frozen=True)
class SchemeSymbol:
    """Amplification polynomial, coefficients listed from the highest power of ξ."""

    name: str
    coefficients: Callable[[float, Mapping[str, float]], Sequence[complex]] = field(repr=False)
    stability_param: str = "s"
    defaults: Mapping[str, float] = field(default_factory=dict)

    def coeffs(self, theta: float, params: Mapping[str, float]) -> List[complex]:
        merged = {**self.defaults, **params}
        return [complex(c) for c in self.coefficients(theta, merged)]


def _heat_explicit(theta, p):
    return [1.0, -(1.0 - 2.0 * p["s"] * (1.0 - math.cos(theta)))]


def _heat_qscheme(theta, p):
    q, s = p["Q"], p["s"]
    w = 1.0 - math.cos(theta)
    return [1.0 + 2.0 * q * s * w, -(1.0 - 2.0 * (1.0 - q) * s * w)]


def _wave_leapfrog(theta, p):
    rho = p["s"] * (math.cos(theta) - 1.0)
    return [1.0, -2.0 * (1.0 + rho), 1.0]


def _advection_leapfrog(theta, p):
    return [1.0, 2j * p["nu"] * math.sin(theta), -1.0]


BUILTIN_SYMBOLS: Dict[str, SchemeSymbol] = {
    "heat-explicit": SchemeSymbol("heat-explicit", _heat_explicit, "s"),
    "heat-qscheme": SchemeSymbol("heat-qscheme", _heat_qscheme, "s", {"Q": 0.5}),
    "crank-nicolson": SchemeSymbol("crank-nicolson", _heat_qscheme, "s", {"Q": 0.5}),
    "wave-leapfrog": SchemeSymbol("wave-leapfrog", _wave_leapfrog, "s"),
    "advection-leapfrog": SchemeSymbol("advection-leapfrog", _advection_leapfrog, "nu"),
}


def _roots(coeffs: Sequence[complex]) -> np.ndarray:
    if len(coeffs) == 2:
        a, b = coeffs
        if a == 0:
            raise SymbolError("leading coefficient vanishes")
        return np.array([-b / a])
    if len(coeffs) == 3:
        a, b, c = coeffs
        if a == 0:
            raise SymbolError("leading coefficient vanishes")
        root = cmath.sqrt(b * b - 4 * a * c)
        return np.array([(-b + root) / (2 * a), (-b - root) / (2 * a)])
    raise SymbolError(f"amplification polynomial must have degree 1 or 2, got {len(coeffs) - 1}")


def _is_double(coeffs: Sequence[complex]) -> bool:
    if len(coeffs) != 3:
        return False
    a, b, c = coeffs
    scale = max(1.0, abs(b) ** 2, abs(4 * a * c))
    return abs(b * b - 4 * a * c) < DOUBLE_ROOT_TOL * scale


def amplification_factors(symbol: SchemeSymbol, theta: float, params: Mapping[str, float]) -> np.ndarray:
    return _roots(symbol.coeffs(theta, params))


@dataclass
class StabilityVerdict:
    stable: bool
    classification: str
    max_modulus: Optional[float] = None
    worst_theta: Optional[float] = None
    omega: Optional[float] = None
    worst_k: Optional[float] = None
    algebraic_growth: bool = False

    def as_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if v is not None}
        if out.get("omega") == math.inf:
            out["omega"] = "inf"
        return out


def scheme_stability(symbol: SchemeSymbol, params: Mapping[str, float], n_theta: Optional[int] = None) -> StabilityVerdict:
    """Maximum |ξ| over θ = 2πm/n_theta."""
    n_theta = n_theta or config.THETA_SAMPLES
    if n_theta < 64:
        raise SymbolError("n_theta must be at least 64")
    worst, worst_theta, double = -1.0, 0.0, False
    for m in range(n_theta):
        theta = 2.0 * math.pi * m / n_theta
        coeffs = symbol.coeffs(theta, params)
        mod = float(np.max(np.abs(_roots(coeffs))))
        if mod > worst:
            worst, worst_theta = mod, theta
        if m and abs(mod - 1.0) <= 1e-9 and _is_double(coeffs):
            double = True
    stable = worst <= 1.0 + MODULUS_TOL
    if not stable:
        kind = "unstable"
    elif double:
        kind = ALGEBRAIC
    elif worst >= 1.0 - MODULUS_TOL:
        kind = NEUTRAL
    else:
        kind = "strictly stable"
    return StabilityVerdict(stable, kind, max_modulus=worst, worst_theta=worst_theta, algebraic_growth=double and stable)


def stability_threshold(
    symbol: SchemeSymbol,
    lo: float,
    hi: float,
    params: Optional[Mapping[str, float]] = None,
    *,
    n_theta: Optional[int] = None,
    xtol: float = 1e-9,
) -> float:
    """Bisection on the symbol's stability parameter between a stable *lo* and unstable *hi*."""
    base = dict(params or {})
    name = symbol.stability_param

    def excess(value: float) -> float:
        verdict = scheme_stability(symbol, {**base, name: value}, n_theta)
        return verdict.max_modulus - (1.0 + MODULUS_TOL)

    if not (excess(lo) <= 0 < excess(hi)):
        raise SymbolError(f"[{lo}, {hi}] does not bracket the stability boundary of {symbol.name}")
    return float(optimize.bisect(excess, lo, hi, xtol=xtol))


# ----------------------------------------------------------------------------
# Normal modes
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class PDECoefficients:
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    D: float = 0.0
    E: float = 0.0
    F: float = 0.0

    def __post_init__(self):
        if self.C == 0 and self.E == 0:
            raise SymbolError("normal modes need C != 0 or E != 0")

    def polynomial(self, k: float) -> List[complex]:
        lin = complex(self.E, 2.0 * k * self.B)
        const = complex(-self.A * k * k + self.F, self.D * k)
        if self.C == 0:
            return [lin, const]
        return [complex(self.C), lin, const]

    @classmethod
    def heat(cls, c2: float = 1.0) -> "PDECoefficients":
        return cls(A=-c2, E=1.0)

    @classmethod
    def klein_gordon(cls, gamma: float = 1.0, c: float = 1.0) -> "PDECoefficients":
        return cls(A=-gamma * gamma, C=1.0, F=c * c)

    @classmethod
    def telegrapher(cls, gamma: float = 1.0, damping: float = 1.0) -> "PDECoefficients":
        return cls(A=-gamma * gamma, C=1.0, E=2.0 * damping)


def normal_mode_lambda(coeffs: PDECoefficients, k: float) -> np.ndarray:
    """Roots of ``Cλ² + (2ikB + E)λ + (−Ak² + iDk + F) = 0``."""
    return _roots(coeffs.polynomial(k))


def _k_grid(k_max: float, n_k: int) -> np.ndarray:
    half = max(n_k // 2, 2)
    pos = np.logspace(-3, math.log10(k_max), half)
    return np.concatenate([-pos[::-1], [0.0], pos])


def _max_real(coeffs: PDECoefficients, ks: np.ndarray) -> np.ndarray:
    return np.array([float(np.max(normal_mode_lambda(coeffs, k).real)) for k in ks])


def _tail_unbounded(ks: np.ndarray, re: np.ndarray, k_max: float) -> bool:
    for side in (ks > 0, ks < 0):
        kk, rr = np.abs(ks[side]), re[side]
        order = np.argsort(kk)
        kk, rr = kk[order], rr[order]
        tail = rr[kk >= k_max / 10.0]
        if tail.size < 3:
            continue
        rising = np.all(np.diff(tail) >= -1e-12 * np.max(np.abs(tail)))
        if rising and tail[-1] > 0 and tail[-1] > 2.0 * max(tail[0], 0.0):
            return True
    return False


def stability_index(coeffs: PDECoefficients, k_max: float = 1e4, n_k: Optional[int] = None) -> StabilityVerdict:
    """Ω = sup_k Re λ(k), with +∞ when Re λ keeps growing over the last sampled decade."""
    n_k = n_k or config.K_SAMPLES
    if n_k < 256:
        raise SymbolError("n_k must be at least 256")
    ks = _k_grid(k_max, n_k)
    re = _max_real(coeffs, ks)
    idx = int(np.argmax(re))
    omega, worst_k = float(re[idx]), float(ks[idx])
    if _tail_unbounded(ks, re, k_max):
        logger.info("Re lambda unbounded in k; reporting ill-posed")
        return StabilityVerdict(False, "ill-posed", omega=math.inf, worst_k=math.inf)
    double = coeffs.C != 0 and all(_is_double(coeffs.polynomial(k)) for k in ks)
    if omega > MODULUS_TOL:
        return StabilityVerdict(False, "unstable", omega=omega, worst_k=worst_k)
    if omega >= -MODULUS_TOL:
        kind = ALGEBRAIC if double else NEUTRAL
        return StabilityVerdict(True, kind, omega=0.0 if abs(omega) < MODULUS_TOL else omega,
                                worst_k=worst_k, algebraic_growth=double)
    return StabilityVerdict(True, "strictly stable", omega=omega, worst_k=worst_k)


def classify_mode_type(coeffs: PDECoefficients, k_max: float = 1e4, n_k: Optional[int] = None) -> str:
    """One of ``conservative``, ``dissipative`` or ``neither``.

    Sample points where ``Re λ >= -1e-10`` count as the finitely many allowed
    exceptions of a dissipative equation as long as no two are adjacent.
    """
    n_k = n_k or config.K_SAMPLES
    ks = _k_grid(k_max, n_k)
    all_re = np.array([normal_mode_lambda(coeffs, k).real for k in ks], dtype=object)
    worst_abs = max(float(np.max(np.abs(np.asarray(r, dtype=float)))) for r in all_re)
    if worst_abs < MODULUS_TOL:
        return "conservative"
    re = np.array([float(np.max(np.asarray(r, dtype=float))) for r in all_re])
    verdict = stability_index(coeffs, k_max, max(n_k, 256))
    if verdict.omega is not None and verdict.omega <= MODULUS_TOL:
        exceptions = np.flatnonzero(re >= -1e-10)
        if exceptions.size == 0 or np.all(np.diff(exceptions) > 1):
            return "dissipative"
    return "neither"


@dataclass(frozen=True)
class DispersionRelation:
    coeffs: PDECoefficients
    k_domain: tuple
    dispersive: bool
    gamma2: Optional[float] = None
    c2: Optional[float] = None

    def omega(self, k: float) -> float:
        if self.gamma2 is not None:
            return math.sqrt(self.gamma2 * k * k + self.c2)
        return float(np.max(np.abs(normal_mode_lambda(self.coeffs, k).imag)))

    def phase_speed(self, k: float) -> float:
        return self.omega(k) / k

    def group_velocity_fd(self, k: float) -> float:
        step = 1e-6 * (1.0 + abs(k))
        return (self.omega(k + step) - self.omega(k - step)) / (2.0 * step)

    def group_velocity(self, k: float) -> float:
        if self.gamma2 is not None:
            return self.gamma2 * k / self.omega(k)
        return self.group_velocity_fd(k)

    def omega_second(self, k: float) -> float:
        step = 1e-3 * (1.0 + abs(k))
        return (self.omega(k + step) - 2.0 * self.omega(k) + self.omega(k - step)) / step ** 2


def dispersion(coeffs: PDECoefficients, k_domain: tuple = (0.1, 10.0)) -> DispersionRelation:
    kind = classify_mode_type(coeffs)
    if kind != "conservative":
        raise DispersionError(f"dispersion relation needs a conservative equation, got {kind}")
    gamma2 = c2 = None
    c = coeffs
    if c.B == 0 and c.D == 0 and c.E == 0 and c.C != 0 and -c.A / c.C >= 0 and c.F / c.C >= 0:
        gamma2, c2 = -c.A / c.C, c.F / c.C
    trial = DispersionRelation(coeffs, k_domain, False, gamma2, c2)
    ks = np.logspace(math.log10(k_domain[0]), math.log10(k_domain[1]), 41)
    dispersive = any(abs(trial.omega_second(k)) > 1e-8 for k in ks)
    return DispersionRelation(coeffs, k_domain, dispersive, gamma2, c2)


def phase_speed(coeffs: PDECoefficients, k: float) -> float:
    return dispersion(coeffs).phase_speed(k)


def group_velocity(coeffs: PDECoefficients, k: float) -> float:
    return dispersion(coeffs).group_velocity(k)


__all__ = [
    "SymbolError",
    "DispersionError",
    "SchemeSymbol",
    "BUILTIN_SYMBOLS",
    "amplification_factors",
    "StabilityVerdict",
    "scheme_stability",
    "stability_threshold",
    "PDECoefficients",
    "normal_mode_lambda",
    "stability_index",
    "classify_mode_type",
    "DispersionRelation",
    "dispersion",
    "phase_speed",
    "group_velocity",
]
