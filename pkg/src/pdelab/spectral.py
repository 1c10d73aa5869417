"""Finite Fourier transform solvers.

A :class:`ModeSet` fixes orthonormal eigenfunctions ``M_k`` of the spatial
operator with eigenvalues ``λ_k``; a solution is carried as coefficients
``N_k = (u, M_k)`` and each coefficient obeys a scalar ODE. The nonlinear
heat problem ``u_t = u_xx + λ̂ u (1 − ε² u²)`` on ``(0, π)`` is truncated to
``K`` sine modes (Galerkin).
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate as _integrate

from . import atomic_io, config
from .grid import GridFunction, UniformGrid1D, inner_product, sample
from .numerics import rk4
from .oracles import EigenPair, dalembert

logger = logging.getLogger(__name__)

RESONANCE_TOL = 1e-12


class SpectralError(ValueError):
    pass


@dataclass(frozen=True)
class ModeSet:
    eigenvalues: np.ndarray
    functions: Sequence[Callable[[np.ndarray], np.ndarray]] = field(repr=False)
    l: float = 1.0
    rho: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    derivatives: Optional[Sequence[Callable[[np.ndarray], np.ndarray]]] = field(default=None, repr=False)
    name: str = "modes"

    @property
    def K(self) -> int:
        return len(self.functions)

    def __call__(self, x) -> np.ndarray:
        """Matrix ``M_k(x_j)`` of shape ``(len(x), K)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.column_stack([np.broadcast_to(m(x), x.shape) for m in self.functions])

    @classmethod
    def sine(cls, K: int, l: float = 1.0, c: float = 1.0) -> "ModeSet":
        """``M_k = √(2/l) sin(πkx/l)``, ``λ_k = (πkc/l)²``, ``k = 1..K``."""
        amp = math.sqrt(2.0 / l)
        ks = np.arange(1, K + 1)
        funcs = [functools.partial(_sin_mode, amp, math.pi * k / l) for k in ks]
        ders = [functools.partial(_sin_mode_dx, amp, math.pi * k / l) for k in ks]
        return cls((math.pi * ks * c / l) ** 2, funcs, l, None, ders, "sine")

    @classmethod
    def cosine(cls, K: int, l: float = 1.0, c: float = 1.0) -> "ModeSet":
        """Neumann modes ``k = 0..K−1``."""
        ks = np.arange(0, K)
        funcs = [functools.partial(_cos_mode, (1.0 if k == 0 else math.sqrt(2.0)) / math.sqrt(l), math.pi * k / l)
                 for k in ks]
        return cls((math.pi * ks * c / l) ** 2, funcs, l, None, None, "cosine")

    @classmethod
    def from_eigenpairs(cls, pairs: Sequence[EigenPair], l: float, rho=None) -> "ModeSet":
        return cls(np.array([p.lam for p in pairs]), [p.eigenfunction for p in pairs], l, rho, None, "sturm-liouville")


def _sin_mode(amp, w, x):
    return amp * np.sin(w * x)


def _sin_mode_dx(amp, w, x):
    return amp * w * np.cos(w * x)


def _cos_mode(amp, w, x):
    return amp * np.cos(w * x)


@dataclass(frozen=True)
class ModeCoefficients:
    values: np.ndarray
    times: Optional[np.ndarray] = None

    @property
    def K(self) -> int:
        return self.values.shape[-1]

    def to_csv(self, path: Union[str, Path]) -> Path:
        if self.times is None:
            raise SpectralError("only trajectories are exported")
        header = ["t"] + [f"N{k}" for k in range(1, self.K + 1)]
        return atomic_io.write_table(path, header, [self.times, *self.values.T])


def _projection_grid(modes: ModeSet, n: int) -> UniformGrid1D:
    return UniformGrid1D(0.0, modes.l, n)


def forward(u: Callable[[np.ndarray], np.ndarray], modes: ModeSet, n: int = 2000) -> ModeCoefficients:
    """``N_k = (u, M_k)_ρ`` by trapezoid inner products on an ``n``-cell grid."""
    grid = _projection_grid(modes, n)
    ug = sample(u, grid)
    values = [inner_product(ug, sample(m, grid), modes.rho) for m in modes.functions]
    return ModeCoefficients(np.array(values))


def inverse(coeffs: Union[ModeCoefficients, Sequence[float]], modes: ModeSet) -> Callable[[np.ndarray], np.ndarray]:
    vals = np.asarray(coeffs.values if isinstance(coeffs, ModeCoefficients) else coeffs, dtype=float)
    if vals.shape[-1] != modes.K:
        raise SpectralError(f"{vals.shape[-1]} coefficients for {modes.K} modes")

    def u(x):
        out = modes(x) @ vals
        return out if np.ndim(x) else float(out[0])

    return u


# ----------------------------------------------------------------------------
# Forcing and per-mode solutions
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantForcing:
    amplitudes: np.ndarray

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.amplitudes, dtype=float)


@dataclass(frozen=True)
class SinusoidalForcing:
    """``F_k(t) = A_k sin(ωt)``."""

    amplitudes: np.ndarray
    omega: float

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.amplitudes, dtype=float) * math.sin(self.omega * t)


Forcing = Union[ConstantForcing, SinusoidalForcing, Callable[[float], np.ndarray], None]


def _convolve(F: Callable[[float], np.ndarray], kernel: Callable[[float], np.ndarray], t: float) -> np.ndarray:
    if t == 0:
        return 0.0
    val, err = _integrate.quad_vec(lambda tau: F(tau) * kernel(tau), 0.0, t,
                                   epsabs=config.QUAD_TOL, epsrel=1e-12, limit=config.QUAD_LIMIT)
    return val


def _parabolic_response(F: Forcing, lam: np.ndarray, t: float) -> np.ndarray:
    if F is None:
        return np.zeros_like(lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        if isinstance(F, ConstantForcing):
            frac = np.where(lam == 0, t, -np.expm1(-lam * t) / np.where(lam == 0, 1.0, lam))
            return np.asarray(F.amplitudes, dtype=float) * frac
        if isinstance(F, SinusoidalForcing):
            w = F.omega
            resp = (lam * math.sin(w * t) - w * math.cos(w * t) + w * np.exp(-lam * t)) / (lam * lam + w * w)
            if w == 0:
                resp = np.zeros_like(lam)
            return np.asarray(F.amplitudes, dtype=float) * resp
    return _convolve(F, lambda tau: np.exp(-lam * (t - tau)), t)


def solve_parabolic_modes(
    modes: ModeSet,
    N0: Sequence[float],
    t: float,
    F: Forcing = None,
    B: Forcing = None,
) -> ModeCoefficients:
    """``N_k′ + λ_k N_k = F_k + B_k`` in closed form."""
    lam = np.asarray(modes.eigenvalues, dtype=float)
    N = np.asarray(N0, dtype=float) * np.exp(-lam * t)
    N = N + _parabolic_response(F, lam, t) + _parabolic_response(B, lam, t)
    return ModeCoefficients(N)


def _hyperbolic_response(F: Forcing, lam: np.ndarray, t: float) -> np.ndarray:
    if F is None:
        return np.zeros_like(lam)
    w = np.sqrt(lam)
    if isinstance(F, ConstantForcing):
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(lam == 0, 0.5 * t * t, (1.0 - np.cos(w * t)) / np.where(lam == 0, 1.0, lam))
        return np.asarray(F.amplitudes, dtype=float) * frac
    if isinstance(F, SinusoidalForcing):
        om = F.omega
        out = np.empty_like(lam)
        for i, (li, wi) in enumerate(zip(lam, w)):
            if abs(om * om - li) < RESONANCE_TOL * max(li, 1.0):
                out[i] = (math.sin(wi * t) / wi - t * math.cos(wi * t)) / (2.0 * wi)
            else:
                out[i] = (om * math.sin(wi * t) - wi * math.sin(om * t)) / (wi * (om * om - li))
        return np.asarray(F.amplitudes, dtype=float) * out
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = lambda tau: np.where(lam == 0, t - tau, np.sin(w * (t - tau)) / np.where(lam == 0, 1.0, w))
    return _convolve(F, kernel, t)


def solve_hyperbolic_modes(
    modes: ModeSet,
    N0: Sequence[float],
    N0_dot: Sequence[float],
    t: float,
    F: Forcing = None,
    B: Forcing = None,
) -> ModeCoefficients:
    """``N_k″ + λ_k N_k = F_k + B_k`` in closed form."""
    lam = np.asarray(modes.eigenvalues, dtype=float)
    w = np.sqrt(lam)
    N0, V0 = np.asarray(N0, dtype=float), np.asarray(N0_dot, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        free = N0 * np.cos(w * t) + np.where(lam == 0, V0 * t, V0 * np.sin(w * t) / np.where(lam == 0, 1.0, w))
    return ModeCoefficients(free + _hyperbolic_response(F, lam, t) + _hyperbolic_response(B, lam, t))


def resonance_sweep(lam: float, omegas: Sequence[float], t_end: float, n_t: int = 4000) -> np.ndarray:
    """``max_t |N(t)|`` of a unit sinusoidally forced mode for each driving frequency."""
    modes = ModeSet(np.array([lam]), [np.sin], 1.0)
    ts = np.linspace(0.0, t_end, n_t + 1)
    out = []
    for om in omegas:
        force = SinusoidalForcing(np.array([1.0]), float(om))
        out.append(max(abs(float(solve_hyperbolic_modes(modes, [0.0], [0.0], t, force).values[0])) for t in ts))
    return np.array(out)


# ----------------------------------------------------------------------------
# Boundary data
# ----------------------------------------------------------------------------


TimeFn = Callable[[float], float]


@dataclass(frozen=True)
class BoundaryLift:
    """``v(x, t) = (x g₂(t) + (l − x) g₁(t)) / l`` and its time derivative."""

    g1: TimeFn
    g2: TimeFn
    dg1: TimeFn
    dg2: TimeFn
    l: float

    def v(self, x, t: float):
        x = np.asarray(x, dtype=float)
        return (x * self.g2(t) + (self.l - x) * self.g1(t)) / self.l

    def v_t(self, x, t: float):
        x = np.asarray(x, dtype=float)
        return (x * self.dg2(t) + (self.l - x) * self.dg1(t)) / self.l

    def source(self, g: Optional[Callable] = None) -> Callable:
        """Source of the homogenised problem: ``g − v_t``."""
        if g is None:
            return lambda x, t: -self.v_t(x, t)
        return lambda x, t: g(x, t) - self.v_t(x, t)

    def initial(self, f: Callable) -> Callable:
        return lambda x: f(x) - self.v(x, 0.0)


def _zero(t: float) -> float:
    return 0.0


def boundary_lift_1d(
    g1: Optional[TimeFn], g2: Optional[TimeFn], l: float = 1.0, dg1: Optional[TimeFn] = None, dg2: Optional[TimeFn] = None
) -> BoundaryLift:
    return BoundaryLift(g1 or _zero, g2 or _zero, dg1 or _zero, dg2 or _zero, l)


def boundary_forcing_sine(modes: ModeSet, g1: Optional[TimeFn], g2: Optional[TimeFn], c2: float = 1.0) -> Callable[[float], np.ndarray]:
    """Endpoint term ``B_k(t) = c² (g₁(t) M_k′(0) − g₂(t) M_k′(l))`` for Dirichlet data."""
    if modes.derivatives is None:
        raise SpectralError("boundary forcing needs mode derivatives")
    d0 = np.array([float(np.asarray(d(np.asarray(0.0)))) for d in modes.derivatives])
    dl = np.array([float(np.asarray(d(np.asarray(modes.l)))) for d in modes.derivatives])
    g1, g2 = g1 or _zero, g2 or _zero
    return lambda t: c2 * (g1(t) * d0 - g2(t) * dl)


def solve_heat_lifted(
    f: Callable,
    g1: Optional[TimeFn],
    g2: Optional[TimeFn],
    t: float,
    *,
    dg1: Optional[TimeFn] = None,
    dg2: Optional[TimeFn] = None,
    c: float = 1.0,
    l: float = 1.0,
    K: int = 50,
    source: Optional[Callable] = None,
    boundary: str = "lift",
) -> Callable[[np.ndarray], np.ndarray]:
    """``u_t = c² u_xx + G`` with Dirichlet data ``g₁, g₂``.

    ``boundary="lift"`` subtracts the linear lift, transforms the homogenised
    problem and adds the lift back. ``boundary="transform"`` transforms ``u``
    itself and carries the data in the endpoint term of
    :func:`boundary_forcing_sine`; its partial sums vanish at the ends and
    converge like ``1/K`` inside.
    """
    if boundary not in ("lift", "transform"):
        raise SpectralError(f"unknown boundary treatment {boundary!r}")
    modes = ModeSet.sine(K, l, c)

    def G(tau: float) -> np.ndarray:
        return forward(lambda x: source(x, tau), modes, 400).values

    if boundary == "transform":
        N0 = forward(f, modes).values
        B = boundary_forcing_sine(modes, g1, g2, c * c)
        N = solve_parabolic_modes(modes, N0, t, G if source is not None else None, B).values
        return inverse(N, modes)

    lift = boundary_lift_1d(g1, g2, l, dg1, dg2)
    N0 = forward(lift.initial(f), modes).values
    k = np.arange(1, K + 1)
    amp = math.sqrt(2.0 / l) * l * l / (math.pi * k)
    left, right = amp, amp * (-1.0) ** (k + 1)

    def F(tau: float) -> np.ndarray:
        out = -(lift.dg1(tau) * left + lift.dg2(tau) * right) / l
        if source is not None:
            out = out + G(tau)
        return out

    N = solve_parabolic_modes(modes, N0, t, F).values
    w = inverse(N, modes)
    return lambda x: lift.v(x, t) + w(x)


# ----------------------------------------------------------------------------
# Duhamel
# ----------------------------------------------------------------------------


def duhamel_wave(
    g: Optional[Callable[[float, float], float]],
    c: float = 1.0,
    f: Optional[Callable] = None,
    g0: Optional[Callable] = None,
) -> Callable[[float, float], float]:
    """``u_tt = c² u_xx + g`` on the line with data ``u = f``, ``u_t = g0``."""

    def u(x: float, t: float) -> float:
        total = 0.0
        if f is not None or g0 is not None:
            total = dalembert(f if f is not None else _zero, g0, c, x, t)
        if g is not None and t > 0:
            val, err = _integrate.dblquad(
                lambda theta, tau: g(theta, tau),
                0.0,
                t,
                lambda tau: x - c * (t - tau),
                lambda tau: x + c * (t - tau),
                epsabs=config.QUAD_TOL,
                epsrel=1e-10,
            )
            total += val / (2.0 * c)
        return total

    return u


def duhamel_heat(
    source: Callable[[np.ndarray, float], np.ndarray],
    modes: ModeSet,
    f: Optional[Callable] = None,
) -> Callable[[np.ndarray, float], np.ndarray]:
    """Heat response to a distributed source via per-mode convolution."""
    N0 = forward(f, modes).values if f is not None else np.zeros(modes.K)

    def u(x, t: float):
        F = lambda tau: forward(lambda s: source(s, tau), modes, 400).values
        N = solve_parabolic_modes(modes, N0, t, F).values
        return inverse(N, modes)(x)

    return u


# ----------------------------------------------------------------------------
# Disk
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class DiskCoefficients:
    a0: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def K(self) -> int:
        return self.a.shape[-1]


def disk_transform(u: Callable[[np.ndarray, np.ndarray], np.ndarray], r, n_theta: int = 256, K: Optional[int] = None) -> DiskCoefficients:
    """Angular coefficients ``a₀(r) = (1/√(2π))∫u``, ``a_k = (1/√π)∫u cos kθ``, ``b_k = (1/√π)∫u sin kθ``."""
    K = K or n_theta // 2 - 1
    if K >= n_theta // 2:
        raise SpectralError(f"K={K} needs more than {n_theta} angular samples")
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    r = np.atleast_1d(np.asarray(r, dtype=float))
    R, T = np.meshgrid(r, theta, indexing="ij")
    vals = np.broadcast_to(np.asarray(u(R, T), dtype=float), R.shape)
    spec = np.fft.rfft(vals, axis=1) * (2.0 * math.pi / n_theta)
    a0 = spec[:, 0].real / math.sqrt(2.0 * math.pi)
    a = spec[:, 1:K + 1].real / math.sqrt(math.pi)
    b = -spec[:, 1:K + 1].imag / math.sqrt(math.pi)
    return DiskCoefficients(a0, a, b)


def disk_inverse(coeffs: DiskCoefficients, theta) -> np.ndarray:
    """Values ``u(r_i, θ_j)`` of shape ``(len(r), len(θ))``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    k = np.arange(1, coeffs.K + 1)
    cos, sin = np.cos(np.multiply.outer(k, theta)), np.sin(np.multiply.outer(k, theta))
    return coeffs.a0[:, None] / math.sqrt(2.0 * math.pi) + (coeffs.a @ cos + coeffs.b @ sin) / math.sqrt(math.pi)


def periodic_eigenvalues(K: int) -> List[Tuple[float, int]]:
    """``(λ_k, multiplicity)`` for ``−u″ = λu`` with period ``2π``."""
    return [(float(k * k), 1 if k == 0 else 2) for k in range(K + 1)]


# ----------------------------------------------------------------------------
# Nonlinear heat, Galerkin truncation
# ----------------------------------------------------------------------------


@functools.lru_cache(maxsize=8)
def galerkin_couplings(K: int) -> np.ndarray:
    """``T[i, j, k, l] = ∫₀^π M_i M_j M_k M_l`` for ``M_k = √(2/π) sin kx``.

    The products are trigonometric polynomials of degree ``<= 4K``; the
    trapezoid rule with ``4K + 4`` panels integrates them exactly.
    """
    if not 1 <= K <= 32:
        raise SpectralError(f"Galerkin truncation must satisfy 1 <= K <= 32, got {K}")
    n = 4 * K + 4
    x = np.linspace(0.0, math.pi, n + 1)
    w = np.full(n + 1, math.pi / n)
    w[0] = w[-1] = 0.5 * math.pi / n
    S = math.sqrt(2.0 / math.pi) * np.sin(np.outer(np.arange(1, K + 1), x))
    pair = S[:, None, :] * S[None, :, :]
    T = np.einsum("ijn,kln,n->ijkl", pair, pair, w)
    T.flags.writeable = False
    return T


@dataclass(frozen=True)
class GalerkinTrajectory:
    times: np.ndarray
    coeffs: np.ndarray
    lam_hat: float
    eps: float
    blow_up: Optional[float] = None

    @property
    def final(self) -> np.ndarray:
        return self.coeffs[-1]

    def mode(self, k: int) -> np.ndarray:
        return self.coeffs[:, k - 1]

    def as_coefficients(self) -> ModeCoefficients:
        return ModeCoefficients(self.coeffs, self.times)


def galerkin_rhs(lam_hat: float, eps: float, K: int) -> Callable[[float, np.ndarray], np.ndarray]:
    T = galerkin_couplings(K)
    rate = lam_hat - np.arange(1, K + 1) ** 2
    scale = lam_hat * eps * eps

    def rhs(t: float, N: np.ndarray) -> np.ndarray:
        return rate * N - scale * np.einsum("kijl,i,j,l->k", T, N, N, N)

    return rhs


def nonlinear_heat_galerkin(
    lam_hat: float,
    eps: float,
    h: Union[Callable, Sequence[float]],
    K: int,
    t_end: float,
    *,
    dt: Optional[float] = None,
) -> GalerkinTrajectory:
    """``N_k′ + (k² − λ̂) N_k = −λ̂ ε² Σ a_k^{ijl} N_i N_j N_l`` by fixed-step RK4."""
    if callable(h):
        N0 = forward(h, ModeSet.sine(K, math.pi)).values
    else:
        N0 = np.asarray(h, dtype=float)
        if N0.size != K:
            raise SpectralError(f"{N0.size} initial coefficients for K={K}")
    rates = np.abs(np.arange(1, K + 1) ** 2 - lam_hat)
    if dt is None:
        dt = min(0.1 / max(float(np.max(rates)), 1e-12), 0.01)
    n_steps = max(1, int(math.ceil(t_end / dt)))
    with np.errstate(all="ignore"):
        traj = rk4(galerkin_rhs(lam_hat, eps, K), N0, 0.0, t_end, n_steps)
    times = np.linspace(0.0, t_end, n_steps + 1)
    peak = np.max(np.abs(np.nan_to_num(traj, nan=np.inf)), axis=1)
    over = np.flatnonzero(peak > config.BLOWUP_THRESHOLD)
    blow_up = None
    if over.size:
        stop = int(over[0])
        blow_up = float(times[stop])
        traj, times = traj[:stop + 1], times[:stop + 1]
        logger.warning("Galerkin run blew up at t=%g", blow_up)
    logger.info("Galerkin K=%d lam_hat=%g: %d steps of %.3g", K, lam_hat, n_steps, t_end / n_steps)
    return GalerkinTrajectory(times, traj, lam_hat, eps, blow_up)


def riccati_single_mode(lam_hat: float, eps: float, n10: float, t):
    """Closed-form single-mode truncation."""
    mu = lam_hat - 1.0
    if mu == 0:
        raise SpectralError("single-mode closed form needs lam_hat != 1")
    A = 3.0 * lam_hat * eps * eps * n10 * n10 / (2.0 * math.pi * mu)
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):
        decay = np.exp(-2.0 * mu * t)
        return n10 / np.sqrt(decay + A * (1.0 - decay))


def stationary_limit(lam_hat: float, eps: float, sign: float = 1.0) -> float:
    if lam_hat <= 1.0:
        return 0.0
    return math.copysign(1.0, sign) * math.sqrt(2.0 * math.pi / 3.0) * math.sqrt((lam_hat - 1.0) / (lam_hat * eps * eps))


def uniform_data_solution(lam_hat: float, eps: float, t):
    """Spatially uniform solution ``u(0) = ε`` of ``u′ = λ̂ u (1 − u²)``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):
        decay = np.exp(-2.0 * lam_hat * t)
        return eps / np.sqrt(decay * (1.0 - eps * eps) + eps * eps)


__all__ = [
    "SpectralError",
    "ModeSet",
    "ModeCoefficients",
    "forward",
    "inverse",
    "ConstantForcing",
    "SinusoidalForcing",
    "solve_parabolic_modes",
    "solve_hyperbolic_modes",
    "resonance_sweep",
    "BoundaryLift",
    "boundary_lift_1d",
    "boundary_forcing_sine",
    "solve_heat_lifted",
    "duhamel_wave",
    "duhamel_heat",
    "DiskCoefficients",
    "disk_transform",
    "disk_inverse",
    "periodic_eigenvalues",
    "galerkin_couplings",
    "GalerkinTrajectory",
    "galerkin_rhs",
    "nonlinear_heat_galerkin",
    "riccati_single_mode",
    "stationary_limit",
    "uniform_data_solution",
]
