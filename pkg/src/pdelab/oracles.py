"""Closed-form and series reference solutions.

Every oracle is a plain callable (``u(x)``, ``u(x, t)`` or ``u(x, y)``) built
from its data; quadrature goes through :func:`pdelab.numerics.integrate`, so
profile kinks and compact supports are honoured as breakpoints.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate as _integrate
from scipy import special
from scipy.interpolate import CubicSpline

from . import config
from .numerics import integrate, rk4, scan_roots

logger = logging.getLogger(__name__)

Func = Callable[..., np.ndarray]
Basis = Literal["sine", "cosine", "full"]
KERNEL_WINDOW = 12.0


class OracleError(ValueError):
    pass


def _scalar(f: Func) -> Callable[[float], float]:
    return lambda s: float(np.asarray(f(np.asarray(s, dtype=float))))


def _kinks(f) -> Tuple[float, ...]:
    return tuple(getattr(f, "kinks", ()) or ())


def _support(f, support=None) -> Optional[Tuple[float, float]]:
    return support if support is not None else getattr(f, "support", None)


def _clip(lo: float, hi: float, support) -> Tuple[float, float]:
    if support is None:
        return lo, hi
    return max(lo, support[0]), min(hi, support[1])


# ----------------------------------------------------------------------------
# D'Alembert
# ----------------------------------------------------------------------------


def dalembert(f: Func, g: Optional[Func], gamma: float, x: float, t: float) -> float:
    """``½(f(x+γt) + f(x−γt)) + (1/2γ) ∫_{x−γt}^{x+γt} g``."""
    if not gamma > 0:
        raise OracleError(f"wave speed must be positive, got {gamma}")
    fs = _scalar(f)
    u = 0.5 * (fs(x + gamma * t) + fs(x - gamma * t))
    if g is not None and t != 0:
        u += integrate(_scalar(g), x - gamma * t, x + gamma * t, points=_kinks(g)) / (2.0 * gamma)
    return u


# ----------------------------------------------------------------------------
# Sturm-Liouville
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenPair:
    lam: float
    eigenfunction: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    norm2: float = 1.0
    x: np.ndarray = field(default=None, repr=False)
    values: np.ndarray = field(default=None, repr=False)

    def __call__(self, x):
        return self.eigenfunction(x)


@dataclass(frozen=True)
class SturmLiouville:
    """``−(p u′)′ + q u = λ ρ u`` on ``(0, l)`` with
    ``α₁u(0) − β₁u′(0) = 0`` and ``α₂u(l) + β₂u′(l) = 0``."""

    p: Callable[[float], float]
    q: Callable[[float], float]
    rho: Callable[[float], float]
    a1: float
    b1: float
    a2: float
    b2: float
    l: float = 1.0

    def __post_init__(self):
        if self.a1 + self.b1 <= 0 or self.a2 + self.b2 <= 0 or min(self.a1, self.b1, self.a2, self.b2) < 0:
            raise OracleError("boundary coefficients must be nonnegative with a_i + b_i > 0")
        if not self.l > 0:
            raise OracleError(f"interval length must be positive, got {self.l}")

    @classmethod
    def dirichlet(cls, l: float = 1.0) -> "SturmLiouville":
        one = lambda x: 1.0
        return cls(one, lambda x: 0.0, one, 1.0, 0.0, 1.0, 0.0, l)

    @classmethod
    def neumann(cls, l: float = 1.0) -> "SturmLiouville":
        one = lambda x: 1.0
        return cls(one, lambda x: 0.0, one, 0.0, 1.0, 0.0, 1.0, l)

    def _rhs(self, lam: np.ndarray):
        # state rows: v, p v', w, p w'
        def rhs(x, y):
            px, qx, rx = self.p(x), self.q(x), self.rho(x)
            k = qx - lam * rx
            return np.array([y[1] / px, k * y[0], y[3] / px, k * y[2]])

        return rhs

    def _shoot(self, lam, n_steps: int, keep: bool = False):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        p0 = self.p(0.0)
        y0 = np.array([np.ones_like(lam), np.zeros_like(lam), np.zeros_like(lam), np.full_like(lam, p0)])
        return rk4(self._rhs(lam), y0, 0.0, self.l, n_steps, keep=keep)

    def determinant(self, lam, n_steps: Optional[int] = None) -> np.ndarray:
        n_steps = n_steps or config.SL_STEPS
        v, pv, w, pw = self._shoot(lam, n_steps)
        pl = self.p(self.l)
        u = self.b1 * v + self.a1 * w
        du = (self.b1 * pv + self.a1 * pw) / pl
        return self.a2 * u + self.b2 * du


def sl_shoot(
    problem: SturmLiouville,
    lam_lo: float,
    lam_hi: float,
    *,
    n_steps: Optional[int] = None,
    n_scan: int = 1000,
) -> List[EigenPair]:
    """Eigenpairs in ``[lam_lo, lam_hi]`` by shooting from ``x = 0``."""
    n_steps = n_steps or config.SL_STEPS
    scan = np.linspace(lam_lo, lam_hi, n_scan + 1)
    dets = problem.determinant(scan, n_steps)
    det1 = lambda lam: float(problem.determinant(lam, n_steps)[0])
    roots = scan_roots(det1, lam_lo, lam_hi, n_scan, samples=dets)
    logger.info("sl_shoot: %d eigenvalues in [%g, %g]", len(roots), lam_lo, lam_hi)

    xs = np.linspace(0.0, problem.l, n_steps + 1)
    rho = np.array([problem.rho(x) for x in xs])
    pairs = []
    for lam in roots:
        traj = problem._shoot(lam, n_steps, keep=True)[:, :, 0]
        values = problem.b1 * traj[:, 0] + problem.a1 * traj[:, 2]
        norm2 = float(_integrate.simpson(rho * values ** 2, x=xs))
        values = values / math.sqrt(norm2)
        lead = values[np.abs(values) > 1e-8 * np.max(np.abs(values))]
        if lead.size and lead[0] < 0:
            values = -values
        spline = CubicSpline(xs, values)
        check = float(_integrate.simpson(rho * values ** 2, x=xs))
        pairs.append(EigenPair(float(lam), spline, check, xs, values))
    return pairs


# ----------------------------------------------------------------------------
# Fourier series
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierSeries:
    """Orthonormal expansion on ``(0, l)`` (sine, cosine) or ``(−l, l)`` (full).

    ``a`` holds sine coefficients ``k = 1..K`` for the sine basis, cosine
    coefficients ``k = 0..K`` otherwise; ``b`` holds the sine part ``k = 1..K``
    of the full basis.
    """

    basis: str
    l: float
    a: np.ndarray
    b: Optional[np.ndarray] = None

    @property
    def K(self) -> int:
        return self.a.size if self.basis == "sine" else self.a.size - 1

    def mode(self, k: int, x, kind: str = "a") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        w = math.pi * k / self.l
        if self.basis == "sine":
            return math.sqrt(2.0 / self.l) * np.sin(w * x)
        if self.basis == "cosine":
            return np.full_like(x, 1.0 / math.sqrt(self.l)) if k == 0 else math.sqrt(2.0 / self.l) * np.cos(w * x)
        if k == 0:
            return np.full_like(x, 1.0 / math.sqrt(2.0 * self.l))
        trig = np.cos if kind == "a" else np.sin
        return trig(w * x) / math.sqrt(self.l)

    def __call__(self, x, K: Optional[int] = None) -> np.ndarray:
        K = self.K if K is None else min(K, self.K)
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if self.basis == "sine":
            for k in range(1, K + 1):
                out = out + self.a[k - 1] * self.mode(k, x)
            return out
        for k in range(0, K + 1):
            out = out + self.a[k] * self.mode(k, x, "a")
            if self.basis == "full" and k > 0:
                out = out + self.b[k - 1] * self.mode(k, x, "b")
        return out

    def energy(self, K: Optional[int] = None) -> float:
        """Sum of squared coefficients, bounded by ``‖f‖²``."""
        K = self.K if K is None else min(K, self.K)
        if self.basis == "sine":
            return float(np.sum(self.a[:K] ** 2))
        total = float(np.sum(self.a[:K + 1] ** 2))
        if self.b is not None:
            total += float(np.sum(self.b[:K] ** 2))
        return total


def fourier_coeffs(f: Func, basis: Basis = "sine", l: float = 1.0, K: Optional[int] = None) -> FourierSeries:
    K = K or config.SERIES_TERMS
    fs, pts = _scalar(f), _kinks(f)
    if basis == "sine":
        a = [math.sqrt(2.0 / l) * integrate(fs, 0.0, l, points=pts, weight="sin", wvar=math.pi * k / l)
             for k in range(1, K + 1)]
        return FourierSeries(basis, l, np.array(a))
    if basis == "cosine":
        a = [integrate(fs, 0.0, l, points=pts) / math.sqrt(l)]
        a += [math.sqrt(2.0 / l) * integrate(fs, 0.0, l, points=pts, weight="cos", wvar=math.pi * k / l)
              for k in range(1, K + 1)]
        return FourierSeries(basis, l, np.array(a))
    if basis == "full":
        a = [integrate(fs, -l, l, points=pts) / math.sqrt(2.0 * l)]
        a += [integrate(fs, -l, l, points=pts, weight="cos", wvar=math.pi * k / l) / math.sqrt(l)
              for k in range(1, K + 1)]
        b = [integrate(fs, -l, l, points=pts, weight="sin", wvar=math.pi * k / l) / math.sqrt(l)
             for k in range(1, K + 1)]
        return FourierSeries(basis, l, np.array(a), np.array(b))
    raise OracleError(f"unknown basis {basis!r}")


@dataclass(frozen=True)
class SeriesSolution:
    """Separated solution on ``(0, l)`` with Dirichlet ends, truncated at ``K`` terms."""

    kind: str
    l: float
    c: float
    a: np.ndarray
    b: Optional[np.ndarray] = None
    l_hat: Optional[float] = None

    @property
    def K(self) -> int:
        return self.a.size

    def rates(self) -> np.ndarray:
        return math.pi * np.arange(1, self.K + 1) * self.c / self.l

    def _modes(self, x) -> np.ndarray:
        k = np.arange(1, self.K + 1)
        x = np.asarray(x, dtype=float)
        return math.sqrt(2.0 / self.l) * np.sin(np.multiply.outer(x, k) * math.pi / self.l)

    def amplitudes(self, t: float) -> np.ndarray:
        w = self.rates()
        if self.kind == "parabolic":
            return self.a * np.exp(-w * w * t)
        if self.kind == "hyperbolic":
            return self.a * np.cos(w * t) + self.b * np.sin(w * t)
        raise OracleError("amplitudes are defined for time-dependent series only")

    def velocities(self, t: float) -> np.ndarray:
        w = self.rates()
        return w * (-self.a * np.sin(w * t) + self.b * np.cos(w * t))

    def energy(self, t: float) -> float:
        """``½ Σ (Ṅ_k² + ω_k² N_k²)``."""
        w = self.rates()
        return 0.5 * float(np.sum(self.velocities(t) ** 2 + (w * self.amplitudes(t)) ** 2))

    def __call__(self, x, s: float):
        if self.kind == "elliptic":
            k = np.arange(1, self.K + 1)
            ratio = lambda y: _sinh_ratio(k, y, self.l, self.l_hat)
            coeff = self.b * ratio(s) + self.a * ratio(self.l_hat - s)
        else:
            coeff = self.amplitudes(s)
        return self._modes(x) @ coeff


def _sinh_ratio(k: np.ndarray, y: float, l: float, l_hat: float) -> np.ndarray:
    """``sinh(πky/l)/sinh(πk l̂/l)`` without overflow."""
    a = math.pi * k / l
    num = -np.expm1(-2.0 * a * y)
    den = -np.expm1(-2.0 * a * l_hat)
    return np.exp(a * (y - l_hat)) * num / den


def heat_series(f: Func, c: float = 1.0, l: float = 1.0, K: Optional[int] = None) -> SeriesSolution:
    return SeriesSolution("parabolic", l, c, fourier_coeffs(f, "sine", l, K).a)


def wave_series(f: Func, g: Optional[Func], c: float = 1.0, l: float = 1.0, K: Optional[int] = None) -> SeriesSolution:
    a = fourier_coeffs(f, "sine", l, K).a
    if g is None:
        b = np.zeros_like(a)
    else:
        k = np.arange(1, a.size + 1)
        b = fourier_coeffs(g, "sine", l, a.size).a * l / (math.pi * k * c)
    return SeriesSolution("hyperbolic", l, c, a, b)


def laplace_rectangle_series(
    f: Optional[Func], g: Optional[Func], l: float = 1.0, l_hat: float = 1.0, K: Optional[int] = None
) -> SeriesSolution:
    """``Δu = 0`` on ``(0,l)×(0,l̂)`` with ``u(x,0) = f``, ``u(x,l̂) = g`` and zero side walls."""
    K = K or config.SERIES_TERMS
    zero = np.zeros(K)
    fa = fourier_coeffs(f, "sine", l, K).a if f is not None else zero
    ga = fourier_coeffs(g, "sine", l, K).a if g is not None else zero
    return SeriesSolution("elliptic", l, 1.0, fa, ga, l_hat)


# ----------------------------------------------------------------------------
# Heat kernel family
# ----------------------------------------------------------------------------


def heat_kernel(x, t: float, c: float = 1.0):
    if not t > 0:
        raise OracleError(f"heat kernel needs t > 0, got {t}")
    return np.exp(-np.asarray(x, dtype=float) ** 2 / (4.0 * c * c * t)) / math.sqrt(4.0 * math.pi * c * c * t)


def _window(x: float, t: float, c: float) -> float:
    return KERNEL_WINDOW * c * math.sqrt(t)


def cauchy_heat(f: Func, c: float = 1.0, support: Optional[Tuple[float, float]] = None) -> Callable[[float, float], float]:
    """Free-space heat solution with ``u(x, 0) = f``."""
    fs, pts, supp = _scalar(f), _kinks(f), _support(f, support)

    def u(x: float, t: float) -> float:
        if t == 0:
            return fs(x)
        w = _window(x, t, c)
        lo, hi = _clip(x - w, x + w, supp)
        if lo >= hi:
            return 0.0
        return integrate(lambda s: float(heat_kernel(x - s, t, c)) * fs(s), lo, hi, points=(*pts, x))

    return u


def halfline_heat(
    f: Optional[Func], g: Optional[Func], c: float = 1.0, *, tol: float = 1e-9
) -> Callable[[float, float], float]:
    """``u_t = c² u_xx`` on ``x > 0`` with ``u(x, 0) = f`` and ``u(0, t) = g``.

    The boundary term is integrated in ``r = x / (2c√(t−τ))``, which removes the
    kernel singularity at ``τ = t``.
    """
    fs = _scalar(f) if f is not None else None
    gs = _scalar(g) if g is not None else None
    pts = _kinks(f) if f is not None else ()

    def u(x: float, t: float) -> float:
        if x < 0:
            raise OracleError(f"half-line solution needs x >= 0, got {x}")
        if not t > 0:
            raise OracleError(f"half-line heat needs t > 0, got {t}")
        total = 0.0
        if fs is not None and x > 0:
            w = _window(x, t, c)
            lo, hi = max(0.0, x - w), x + w
            kern = lambda s: float(heat_kernel(x - s, t, c) - heat_kernel(x + s, t, c)) * fs(s)
            total += integrate(kern, lo, hi, points=(*pts, x), tol=tol)
        if gs is not None:
            if x == 0:
                total += gs(t)
            else:
                r0 = x / (2.0 * c * math.sqrt(t))
                bnd = lambda r: gs(t - x * x / (4.0 * c * c * r * r)) * math.exp(-r * r)
                total += 2.0 / math.sqrt(math.pi) * integrate(bnd, r0, r0 + 10.0, tol=tol)
        return total

    return u


def erf_solution(u0: float, c: float = 1.0) -> Callable[[float, float], float]:
    return lambda x, t: u0 * special.erf(np.asarray(x, dtype=float) / (2.0 * c * math.sqrt(t)))


def image_series_heat(f: Func, c: float = 1.0, l: float = 1.0, J: int = 3) -> Callable[[float, float], float]:
    """Dirichlet heat solution on ``(0, l)`` as a sum of ``2J + 1`` image pairs."""
    fs, pts = _scalar(f), _kinks(f)
    shifts = 2.0 * l * np.arange(-J, J + 1)

    def u(x: float, t: float) -> float:
        images = [p for p in np.concatenate([x - shifts, shifts - x]) if 0 < p < l]
        kern = lambda s: float(np.sum(heat_kernel(x - s - shifts, t, c) - heat_kernel(x + s - shifts, t, c))) * fs(s)
        return integrate(kern, 0.0, l, points=(*pts, *images))

    return u


# ----------------------------------------------------------------------------
# Half plane
# ----------------------------------------------------------------------------


def _line_integral(kern: Callable[[float], float], x: float, supp, pts) -> float:
    if supp is not None:
        return integrate(kern, supp[0], supp[1], points=(*pts, x))
    return integrate(kern, -math.inf, x) + integrate(kern, x, math.inf)


def laplace_halfplane(f: Func, support: Optional[Tuple[float, float]] = None) -> Callable[[float, float], float]:
    """Poisson-kernel solution of ``Δu = 0`` in ``y > 0`` with ``u(x, 0) = f``."""
    fs, pts, supp = _scalar(f), _kinks(f), _support(f, support)

    def u(x: float, y: float) -> float:
        if not y > 0:
            raise OracleError(f"half-plane solution needs y > 0, got {y}")
        kern = lambda s: fs(s) / ((x - s) ** 2 + y * y)
        return y / math.pi * _line_integral(kern, x, supp, pts)

    return u


def halfplane_heaviside(x, y):
    return 0.5 + np.arctan(np.asarray(x, dtype=float) / np.asarray(y, dtype=float)) / math.pi


def neumann_halfplane(g: Func, support: Optional[Tuple[float, float]] = None) -> Callable[[float, float], float]:
    """Harmonic in ``y > 0`` with ``u_y(x, 0) = g``, defined up to a constant."""
    gs, pts, supp = _scalar(g), _kinks(g), _support(g, support)
    if supp is None:
        raise OracleError("Neumann half-plane data needs compact support")

    def u(x: float, y: float) -> float:
        kern = lambda s: math.log((x - s) ** 2 + y * y) * gs(s)
        return _line_integral(kern, x, supp, pts) / (2.0 * math.pi)

    return u


# ----------------------------------------------------------------------------
# Green's functions
# ----------------------------------------------------------------------------


def green_decay(k: float, r):
    return np.exp(-k * np.abs(np.asarray(r, dtype=float))) / (2.0 * k)


def green_radiating(k: float, r):
    return 1j / (2.0 * k) * np.exp(1j * k * np.abs(np.asarray(r, dtype=float)))


def ode_green_solve(f: Union[float, Func], k: float, support: Optional[Tuple[float, float]] = None) -> Callable[[float], float]:
    """Bounded solution of ``−y″ + k² y = f`` on the line."""
    if not k > 0:
        raise OracleError(f"k must be positive, got {k}")
    if not callable(f):
        value = float(f) / (k * k)
        return lambda x: value
    fs, pts, supp = _scalar(f), _kinks(f), _support(f, support)

    def y(x: float) -> float:
        kern = lambda s: float(green_decay(k, x - s)) * fs(s)
        return _line_integral(kern, x, supp, pts)

    return y


def halfline_wave(f: Func, c: float = 1.0) -> Callable[[float, float], float]:
    """Signalling problem ``u(0, t) = f(t)`` on ``x > 0`` with zero initial data."""
    fs = _scalar(f)

    def u(x: float, t: float) -> float:
        tau = t - x / c
        return fs(tau) if tau >= 0 else 0.0

    return u


def legendre(k: int, x):
    if k < 0:
        raise OracleError(f"Legendre degree must be nonnegative, got {k}")
    return special.eval_legendre(k, x)


def legendre_norm2(k: int) -> float:
    return 2.0 / (2 * k + 1)


__all__ = [
    "OracleError",
    "dalembert",
    "EigenPair",
    "SturmLiouville",
    "sl_shoot",
    "FourierSeries",
    "fourier_coeffs",
    "SeriesSolution",
    "heat_series",
    "wave_series",
    "laplace_rectangle_series",
    "heat_kernel",
    "cauchy_heat",
    "halfline_heat",
    "erf_solution",
    "image_series_heat",
    "laplace_halfplane",
    "halfplane_heaviside",
    "neumann_halfplane",
    "green_decay",
    "green_radiating",
    "ode_green_solve",
    "halfline_wave",
    "legendre",
    "legendre_norm2",
]
