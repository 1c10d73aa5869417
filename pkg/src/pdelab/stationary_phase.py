"""Stationary phase asymptotics for ``I(k) = ∫ f(t) e^{ikφ(t)} dt`` and the
Klein-Gordon far field ``ω(λ) = √(γ²λ² + c²)``.

Fourier convention: a field is ``u(x, t) = (1/√(2π)) ∫ [F₊(λ) e^{i(ω t − λ x)}
+ F₋(λ) e^{−i(ω t + λ x)}] dλ``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional

import numpy as np
from scipy import integrate as _integrate

from .numerics import scan_roots

logger = logging.getLogger(__name__)

Branch = Literal["plus", "minus", "both"]
DEGENERATE_TOL = 1e-10


class DegenerateStationaryPointError(ValueError):
    def __init__(self, t0: float, d2: float):
        super().__init__(f"degenerate stationary point at t={t0:g} (phi''={d2:.3g})")
        self.t0 = t0
        self.d2 = d2


def _fd1(g: Callable[[float], float]) -> Callable[[float], float]:
    def d(t: float) -> float:
        h = 1e-6 * (1.0 + abs(t))
        return (g(t + h) - g(t - h)) / (2.0 * h)

    return d


def _fd2(g: Callable[[float], float]) -> Callable[[float], float]:
    def d(t: float) -> float:
        h = 1e-4 * (1.0 + abs(t))
        return (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h)

    return d


@dataclass(frozen=True)
class OscillatoryIntegral:
    f: Callable[[float], complex] = field(repr=False)
    phi: Callable[[float], float] = field(repr=False)
    k: float = 1.0
    lo: float = -1.0
    hi: float = 1.0
    dphi: Optional[Callable[[float], float]] = field(default=None, repr=False)
    d2phi: Optional[Callable[[float], float]] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")
        if not self.hi > self.lo:
            raise ValueError(f"empty range [{self.lo}, {self.hi}]")

    def phase_slope(self, t: float) -> float:
        return (self.dphi or _fd1(self.phi))(t)

    def phase_curvature(self, t: float) -> float:
        return (self.d2phi or _fd2(self.phi))(t)


@dataclass(frozen=True)
class StationaryPoint:
    t0: float
    d2: float
    contribution: complex


@dataclass(frozen=True)
class AsymptoticResult:
    value: complex
    points: List[StationaryPoint]

    @property
    def riemann_lebesgue(self) -> bool:
        return not self.points


def find_stationary_points(dphi: Callable[[float], float], lo: float, hi: float, n_scan: int = 2000) -> List[float]:
    """Interior zeros of ``φ′``."""
    margin = 1e-12 * (hi - lo)
    roots = scan_roots(dphi, lo, hi, n_scan, xtol=1e-12)
    return [r for r in roots if lo + margin < r < hi - margin]


def stationary_phase_eval(integral: OscillatoryIntegral, n_scan: int = 2000) -> AsymptoticResult:
    k = integral.k
    points = []
    total = 0j
    for t0 in find_stationary_points(integral.phase_slope, integral.lo, integral.hi, n_scan):
        d2 = integral.phase_curvature(t0)
        if abs(d2) < DEGENERATE_TOL:
            raise DegenerateStationaryPointError(t0, d2)
        sign = 1.0 if d2 > 0 else -1.0
        term = (
            complex(integral.f(t0))
            * cmath.exp(1j * k * integral.phi(t0))
            * math.sqrt(2.0 * math.pi / (k * abs(d2)))
            * cmath.exp(1j * sign * math.pi / 4.0)
        )
        points.append(StationaryPoint(t0, d2, term))
        total += term
    if not points:
        logger.info("no stationary point in [%g, %g]; integral decays with k", integral.lo, integral.hi)
    return AsymptoticResult(total, points)


def oscillatory_quadrature(integral: OscillatoryIntegral, nodes_per_oscillation: int = 40, min_nodes: int = 4001) -> complex:
    """Composite Simpson on a grid resolving every oscillation of ``e^{ikφ}``."""
    samples = np.linspace(integral.lo, integral.hi, 2001)
    slope = max(abs(integral.phase_slope(t)) for t in samples)
    n = int(nodes_per_oscillation * integral.k * slope * (integral.hi - integral.lo) / (2.0 * math.pi))
    n = max(n, min_nodes)
    n += (n + 1) % 2
    ts = np.linspace(integral.lo, integral.hi, n)
    vals = np.array([complex(integral.f(t)) for t in ts]) * np.exp(1j * integral.k * np.array([integral.phi(t) for t in ts]))
    return complex(_integrate.simpson(vals, x=ts))


# ----------------------------------------------------------------------------
# Klein-Gordon
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class KleinGordon:
    gamma: float = 1.0
    c: float = 1.0

    def omega(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.sqrt(self.gamma ** 2 * lam * lam + self.c ** 2)

    def group_velocity(self, lam):
        return self.gamma ** 2 * np.asarray(lam, dtype=float) / self.omega(lam)

    def omega_second(self, lam):
        return self.gamma ** 2 * self.c ** 2 / self.omega(lam) ** 3

    def stationary_lambda(self, ratio: float) -> Optional[float]:
        """Solution of ``ω′(λ) = x/t``; ``None`` outside the light cone."""
        if abs(ratio) >= self.gamma:
            return None
        return self.c / self.gamma * ratio / math.sqrt(self.gamma ** 2 - ratio ** 2)


def kg_stationary_lambda(gamma: float, c: float, ratio: float) -> Optional[float]:
    return KleinGordon(gamma, c).stationary_lambda(ratio)


@dataclass(frozen=True)
class FarField:
    value: complex
    inside_cone: bool
    lam_star: Optional[float] = None


def kg_farfield(
    F_plus: Optional[Callable[[float], complex]],
    gamma: float,
    c: float,
    x: float,
    t: float,
    *,
    F_minus: Optional[Callable[[float], complex]] = None,
    branch: Branch = "plus",
) -> FarField:
    """Large-``t`` field at fixed ``x/t``; zero outside ``|x/t| < γ``."""
    if not t > 0:
        raise ValueError(f"far field needs t > 0, got {t}")
    kg = KleinGordon(gamma, c)
    lam = kg.stationary_lambda(x / t)
    if lam is None:
        return FarField(0j, False)
    total = 0j
    if branch in ("plus", "both") and F_plus is not None:
        w, w2 = float(kg.omega(lam)), float(kg.omega_second(lam))
        total += complex(F_plus(lam)) / math.sqrt(t * w2) * cmath.exp(1j * (w * t - lam * x + math.pi / 4.0))
    if branch in ("minus", "both") and F_minus is not None:
        lm = -lam
        w, w2 = float(kg.omega(lm)), float(kg.omega_second(lm))
        total += complex(F_minus(lm)) / math.sqrt(t * w2) * cmath.exp(-1j * (w * t + lm * x + math.pi / 4.0))
    return FarField(total, True, lam)


def kg_mode_superposition(
    F_plus: Callable[[np.ndarray], np.ndarray],
    gamma: float,
    c: float,
    x: float,
    t: float,
    lam_lo: float,
    lam_hi: float,
    n: int = 20001,
) -> complex:
    """``(1/√(2π)) ∫ F₊(λ) e^{i(ω t − λ x)} dλ`` over ``[lam_lo, lam_hi]`` by Simpson."""
    lam = np.linspace(lam_lo, lam_hi, n + (n + 1) % 2)
    w = KleinGordon(gamma, c).omega(lam)
    vals = np.asarray(F_plus(lam), dtype=complex) * np.exp(1j * (w * t - lam * x))
    return complex(_integrate.simpson(vals, x=lam)) / math.sqrt(2.0 * math.pi)


# ----------------------------------------------------------------------------
# Wave packets
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianPacket:
    """Initial field ``e^{−ε²x²} e^{−ik₀x}`` evolving under the Klein-Gordon dispersion."""

    k0: float
    eps: float
    gamma: float = 1.0
    c: float = 1.0

    @property
    def kg(self) -> KleinGordon:
        return KleinGordon(self.gamma, self.c)

    @property
    def group_velocity(self) -> float:
        return float(self.kg.group_velocity(self.k0))

    def envelope(self, x):
        return np.exp(-(self.eps * np.asarray(x, dtype=float)) ** 2)

    def spectrum(self, lam):
        lam = np.asarray(lam, dtype=float)
        return math.sqrt(math.pi) / self.eps * np.exp(-((lam - self.k0) ** 2) / (4.0 * self.eps ** 2))


def wave_packet_predicted(packet: GaussianPacket, x, t: float):
    """Envelope carried at the group velocity under the carrier wave."""
    x = np.asarray(x, dtype=float)
    w0 = float(packet.kg.omega(packet.k0))
    return packet.envelope(x - packet.group_velocity * t) * np.exp(1j * (w0 * t - packet.k0 * x))


def wave_packet_exact(packet: GaussianPacket, x, t: float, n: int = 4001):
    """Mode superposition ``(1/2π) ∫ Â(λ) e^{i(ω t − λ x)} dλ`` over ``k₀ ± 12ε``."""
    half = 12.0 * packet.eps
    lam = np.linspace(packet.k0 - half, packet.k0 + half, n + (n + 1) % 2)
    weights = packet.spectrum(lam)
    w = packet.kg.omega(lam)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    phase = np.exp(1j * (np.multiply.outer(-x, lam) + w * t))
    out = _integrate.simpson(phase * weights, x=lam, axis=-1) / (2.0 * math.pi)
    return out if out.size > 1 else complex(out[0])


def packet_peak(packet: GaussianPacket, t: float, x_grid) -> float:
    """Location of ``max |u|`` of the exact packet on ``x_grid``."""
    x_grid = np.asarray(x_grid, dtype=float)
    return float(x_grid[int(np.argmax(np.abs(wave_packet_exact(packet, x_grid, t))))])


__all__ = [
    "DegenerateStationaryPointError",
    "OscillatoryIntegral",
    "StationaryPoint",
    "AsymptoticResult",
    "find_stationary_points",
    "stationary_phase_eval",
    "oscillatory_quadrature",
    "KleinGordon",
    "kg_stationary_lambda",
    "FarField",
    "kg_farfield",
    "kg_mode_superposition",
    "GaussianPacket",
    "wave_packet_predicted",
    "wave_packet_exact",
    "packet_peak",
]
