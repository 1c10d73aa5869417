"""Method of characteristics for first-order scalar equations.

The equation ``a u_x + b u_t = c`` (quasilinear) or ``a v_x + b v_t = c v + d``
(linear) is carried along ``dx/ds = a, dt/ds = b`` from an initial curve
``(x0(τ), t0(τ))`` with data ``φ(τ)``. The Jacobian of the map
``(s, τ) -> (x, t)`` is taken as ``Δ = a ∂τ t − b ∂τ x``; only its zeros and
magnitude are used.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Union

import numpy as np
from scipy import optimize

from . import atomic_io, config
from .numerics import minimize_bounded, rk4, scan_roots

logger = logging.getLogger(__name__)

Coefficient = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
Curve = Callable[[np.ndarray], np.ndarray]

DELTA_TOL = 1e-12
SLOPE_TOL = 1e-14


class CharacteristicError(RuntimeError):
    pass


class InversionError(CharacteristicError):
    def __init__(self, message: str, *, point: tuple = ()):
        super().__init__(message)
        self.point = point


class PostShockError(CharacteristicError):
    def __init__(self, t: float, t_star: float):
        super().__init__(f"post-shock: t={t:g} >= t*={t_star:g}")
        self.t = t
        self.t_star = t_star


def _const(value: float) -> Coefficient:
    return lambda x, t, u: np.full(np.shape(x), value, dtype=float)


@dataclass(frozen=True)
class CharacteristicProblem:
    """``a u_x + b u_t = c`` with data ``u(x0(τ), t0(τ)) = φ(τ)``.

    When ``d`` is given the problem is linear and the transported quantity obeys
    ``dv/ds = c v + d``.
    """

    a: Coefficient = field(repr=False)
    b: Coefficient = field(repr=False)
    c: Coefficient = field(repr=False)
    x0: Curve = field(repr=False)
    t0: Curve = field(repr=False)
    phi: Curve = field(repr=False)
    tau_lo: float = -1.0
    tau_hi: float = 1.0
    d: Optional[Coefficient] = field(default=None, repr=False)
    dx0: Optional[Curve] = field(default=None, repr=False)
    dt0: Optional[Curve] = field(default=None, repr=False)
    name: str = "characteristics"

    def __post_init__(self):
        if not self.tau_hi > self.tau_lo:
            raise CharacteristicError(f"empty τ range [{self.tau_lo}, {self.tau_hi}]")

    @property
    def linear(self) -> bool:
        return self.d is not None

    def rhs(self, s: float, state: np.ndarray) -> np.ndarray:
        x, t, u = state
        du = self.c(x, t, u) * u + self.d(x, t, u) if self.linear else self.c(x, t, u)
        return np.array(np.broadcast_arrays(self.a(x, t, u), self.b(x, t, u), du, x), dtype=float)[:3]

    def initial_state(self, taus: np.ndarray) -> np.ndarray:
        taus = np.asarray(taus, dtype=float)
        return np.array([
            np.broadcast_to(self.x0(taus), taus.shape),
            np.broadcast_to(self.t0(taus), taus.shape),
            np.broadcast_to(self.phi(taus), taus.shape),
        ], dtype=float)

    def curve_slopes(self, tau: float) -> tuple:
        if self.dx0 is not None and self.dt0 is not None:
            return float(self.dx0(tau)), float(self.dt0(tau))
        h = 1e-6 * (1.0 + abs(tau))
        pts = np.array([tau - h, tau + h])
        xs, ts = np.asarray(self.x0(pts), float), np.asarray(self.t0(pts), float)
        xs, ts = np.broadcast_to(xs, (2,)), np.broadcast_to(ts, (2,))
        return float((xs[1] - xs[0]) / (2 * h)), float((ts[1] - ts[0]) / (2 * h))

    def initial_delta(self, tau: float) -> float:
        x, t, u = self.initial_state(np.array([tau]))[:, 0]
        dx, dt = self.curve_slopes(tau)
        a = float(np.asarray(self.a(x, t, u)))
        b = float(np.asarray(self.b(x, t, u)))
        return a * dt - b * dx

    @classmethod
    def transport(cls, speed: float, phi: Curve, tau_lo: float = -5.0, tau_hi: float = 5.0) -> "CharacteristicProblem":
        """``n_t + speed n_x = 0`` with data on ``t = 0``."""
        return cls(_const(speed), _const(1.0), _const(0.0), lambda tau: tau, lambda tau: 0.0 * tau, phi,
                   tau_lo, tau_hi, dx0=lambda tau: 1.0, dt0=lambda tau: 0.0, name="transport")

    @classmethod
    def burgers(cls, phi: Curve, tau_lo: float = -5.0, tau_hi: float = 5.0) -> "CharacteristicProblem":
        """``u_t + u u_x = 0`` with data on ``t = 0``."""
        return cls(lambda x, t, u: u, _const(1.0), _const(0.0), lambda tau: tau, lambda tau: 0.0 * tau, phi,
                   tau_lo, tau_hi, dx0=lambda tau: 1.0, dt0=lambda tau: 0.0, name="burgers")


@dataclass(frozen=True)
class CharacteristicFamily:
    problem: CharacteristicProblem = field(repr=False)
    taus: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    truncated: bool = False

    @property
    def ds(self) -> float:
        return float(self.s[1] - self.s[0]) if self.s.size > 1 else 1.0

    def to_csv(self, path: Union[str, Path]) -> Path:
        S, T = np.meshgrid(self.s, self.taus, indexing="ij")
        cols = [T.ravel(), S.ravel(), self.x.ravel(), self.t.ravel(), self.u.ravel(), self.delta.ravel()]
        return atomic_io.write_table(path, ["tau", "s", "x", "t", "u", "delta"], cols)

    def polylines(self, every: int = 1) -> List[np.ndarray]:
        """Base characteristic curves as ``(n_s, 2)`` arrays of ``(x, t)``."""
        return [np.column_stack([self.x[:, j], self.t[:, j]]) for j in range(0, self.taus.size, every)]


def integrate_family(problem: CharacteristicProblem, n_tau: int, n_s: int, s_max: float) -> CharacteristicFamily:
    if n_tau < 2 or n_s < 2:
        raise CharacteristicError("n_tau and n_s must be at least 2")
    taus = np.linspace(problem.tau_lo, problem.tau_hi, n_tau)
    with np.errstate(all="ignore"):
        traj = rk4(problem.rhs, problem.initial_state(taus), 0.0, s_max, n_s)
    finite = np.all(np.isfinite(traj), axis=(1, 2))
    rows = int(np.argmin(finite)) if not finite.all() else traj.shape[0]
    truncated = rows < traj.shape[0]
    if truncated:
        logger.warning("%s: non-finite state, family truncated at s=%g", problem.name, rows * s_max / n_s)
    traj = traj[:max(rows, 1)]
    s = np.linspace(0.0, s_max, n_s + 1)[:traj.shape[0]]
    x, t, u = traj[:, 0, :], traj[:, 1, :], traj[:, 2, :]
    a = np.broadcast_to(problem.a(x, t, u), x.shape)
    b = np.broadcast_to(problem.b(x, t, u), x.shape)
    edge = 2 if n_tau >= 3 else 1
    delta = a * np.gradient(t, taus, axis=1, edge_order=edge) - b * np.gradient(x, taus, axis=1, edge_order=edge)
    return CharacteristicFamily(problem, taus, s, x, t, u, delta, truncated)


def _trace(problem: CharacteristicProblem, taus: np.ndarray, s: float, ds: float) -> np.ndarray:
    n = max(1, int(math.ceil(abs(s) / ds)))
    return rk4(problem.rhs, problem.initial_state(taus), 0.0, s, n, keep=False)


def evaluate_solution(family: CharacteristicFamily, x: float, t: float) -> float:
    """Invert ``(s, τ) -> (x, t)`` by Newton iteration and return ``u(s, τ)``."""
    ok = np.isfinite(family.delta) & (np.abs(family.delta) > DELTA_TOL)
    if not ok.any():
        raise InversionError("characteristic or uncovered point", point=(x, t))
    dist = np.where(ok, (family.x - x) ** 2 + (family.t - t) ** 2, np.inf)
    i, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
    s, tau = float(family.s[i]), float(family.taus[j])
    problem, ds = family.problem, family.ds

    for _ in range(config.NEWTON_MAX_ITER):
        h = 1e-6 * (1.0 + abs(tau))
        states = _trace(problem, np.array([tau, tau + h, tau - h]), s, ds)
        X, T, U = states[:, 0]
        res = np.array([X - x, T - t])
        if np.max(np.abs(res)) < config.NEWTON_TOL:
            return float(U)
        a = float(np.asarray(problem.a(X, T, U)))
        b = float(np.asarray(problem.b(X, T, U)))
        x_tau = (states[0, 1] - states[0, 2]) / (2 * h)
        t_tau = (states[1, 1] - states[1, 2]) / (2 * h)
        det = a * t_tau - b * x_tau
        if not math.isfinite(det) or abs(det) < DELTA_TOL:
            raise InversionError("characteristic or uncovered point", point=(x, t))
        s -= (t_tau * res[0] - x_tau * res[1]) / det
        tau -= (a * res[1] - b * res[0]) / det
    raise InversionError(f"Newton did not converge at ({x:g}, {t:g})", point=(x, t))


@dataclass(frozen=True)
class CharacteristicPoints:
    taus: List[float]
    fully_characteristic: bool = False


def detect_characteristic_points(problem: CharacteristicProblem, n_tau: int = 1000) -> CharacteristicPoints:
    """Zeros of ``Δ(0, τ)``: places where the initial curve touches a base characteristic."""
    taus = np.linspace(problem.tau_lo, problem.tau_hi, n_tau + 1)
    vals = np.array([problem.initial_delta(tau) for tau in taus])
    if np.max(np.abs(vals)) < 1e-10:
        logger.info("%s: initial curve is characteristic", problem.name)
        return CharacteristicPoints([], True)
    roots = scan_roots(problem.initial_delta, problem.tau_lo, problem.tau_hi, n_tau, samples=vals)
    return CharacteristicPoints(roots)


def jacobian_shock_time(family: CharacteristicFamily) -> "ShockReport":
    """Earliest ``t`` at which ``Δ`` changes sign along some characteristic."""
    best, where = math.inf, []
    for j in range(family.taus.size):
        col = family.delta[:, j]
        flips = np.flatnonzero(np.sign(col[1:]) != np.sign(col[0]))
        if not flips.size:
            continue
        i = int(flips[0]) + 1
        d0, d1 = col[i - 1], col[i]
        w = d0 / (d0 - d1) if d0 != d1 else 1.0
        t_hit = float(family.t[i - 1, j] + w * (family.t[i, j] - family.t[i - 1, j]))
        if t_hit < best - 1e-12:
            best, where = t_hit, [float(family.taus[j])]
        elif abs(t_hit - best) <= 1e-12:
            where.append(float(family.taus[j]))
    return ShockReport(best, where, "jacobian-zero", None if where else "no breakdown")


# ----------------------------------------------------------------------------
# Burgers
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ShockReport:
    t_star: float
    tau_star: List[float]
    method: str = "analytic-formula"
    note: Optional[str] = None

    def as_dict(self) -> dict:
        out = {
            "t_star": self.t_star if math.isfinite(self.t_star) else "inf",
            "tau_star": list(self.tau_star),
            "method": self.method,
        }
        if self.note:
            out["note"] = self.note
        return out


def _shock_window(phi: Curve, x: float) -> tuple:
    support = getattr(phi, "support", None)
    if support is not None:
        return float(support[0]), float(support[1])
    span = 10.0 * (1.0 + abs(x))
    return x - span, x + span


def burgers_implicit(
    phi: Curve,
    x: float,
    t: float,
    *,
    dphi: Optional[Curve] = None,
    t_star: Optional[float] = None,
    tol: float = 1e-12,
) -> float:
    """Solve ``u = φ(x − u t)`` by damped Newton seeded at ``φ(x)``.

    Without ``t_star`` the breakdown time is computed by :func:`shock_time`
    over the profile's support, or over a window of width ``20 (1 + |x|)``
    around ``x`` when the support is unbounded.
    """
    f = lambda z: float(np.asarray(phi(np.asarray(z, dtype=float))))
    if dphi is None:
        df = lambda z: (f(z + 1e-7 * (1 + abs(z))) - f(z - 1e-7 * (1 + abs(z)))) / (2e-7 * (1 + abs(z)))
    else:
        df = lambda z: float(np.asarray(dphi(np.asarray(z, dtype=float))))
    if t_star is None:
        lo, hi = _shock_window(phi, x)
        t_star = shock_time(phi, df, lo, hi).t_star
    if t >= t_star:
        raise PostShockError(t, t_star)

    u = f(x)
    g = u - f(x - u * t)
    for _ in range(4 * config.NEWTON_MAX_ITER):
        if abs(g) < tol:
            return u
        slope = 1.0 + t * df(x - u * t)
        if abs(slope) < SLOPE_TOL:
            raise PostShockError(t, t_star)
        step, lam = g / slope, 1.0
        while lam > 1e-6:
            trial = u - lam * step
            g_trial = trial - f(x - trial * t)
            if abs(g_trial) < abs(g):
                break
            lam *= 0.5
        else:
            break
        u, g = trial, g_trial
    if abs(g) < tol:
        return u
    raise CharacteristicError(f"Burgers solve did not converge at ({x:g}, {t:g}), residual {abs(g):.3g}")


def shock_time(
    phi: Curve,
    dphi: Curve,
    tau_lo: float,
    tau_hi: float,
    n: int = 1000,
) -> ShockReport:
    """``t* = min(−1/φ′)`` over the points where ``φ′ < 0``."""
    if n < 100:
        raise CharacteristicError("shock_time needs at least 100 samples")

    def g(tau: float) -> float:
        slope = float(np.asarray(dphi(np.asarray(tau, dtype=float))))
        return -1.0 / slope if slope < -SLOPE_TOL else 1e300

    taus = np.linspace(tau_lo, tau_hi, n + 1)
    vals = np.array([g(tau) for tau in taus])
    if np.all(vals >= 1e300):
        return ShockReport(math.inf, [], note="no breakdown")

    minima = [
        i for i in range(n + 1)
        if (i == 0 or vals[i] <= vals[i - 1]) and (i == n or vals[i] <= vals[i + 1])
        and ((i > 0 and vals[i] < vals[i - 1]) or (i < n and vals[i] < vals[i + 1]))
        and vals[i] < 1e300
    ]
    if not minima:
        minima = [int(np.argmin(vals))]

    candidates = []
    for i in minima:
        if i in (0, n) and vals[i] < vals[1 if i == 0 else n - 1]:
            candidates.append((float(vals[i]), float(taus[i]), True))
            continue
        lo, hi = taus[max(i - 1, 0)], taus[min(i + 1, n)]
        tau = minimize_bounded(g, lo, hi)
        val = g(tau)
        if val > vals[i]:
            tau, val = float(taus[i]), float(vals[i])
        candidates.append((val, tau, False))

    t_star = min(c[0] for c in candidates)
    picked = [c for c in candidates if c[0] <= t_star + 1e-8 * max(1.0, t_star)]
    taus_star = sorted(c[1] for c in picked)
    if any(c[2] for c in picked):
        edge = picked[0][1]
        direction = 1.0 if edge >= 0.5 * (tau_lo + tau_hi) else -1.0
        width = tau_hi - tau_lo
        tails = [g(edge + direction * width * 10.0 ** j) for j in range(1, 13)]
        note = "infimum at domain boundary"
        if all(p2 < p1 for p1, p2 in zip([t_star] + tails, tails)) and tails[-1] < 1e-9 * t_star:
            t_star = 0.0
        logger.warning("shock_time: %s (t*=%g)", note, t_star)
        return ShockReport(t_star, taus_star, note=note)
    return ShockReport(t_star, taus_star)


def conserved_cubic_solution(phi: Curve, x: float, t: float) -> float:
    """Exact solution of ``(3x² + 1) u_t + 2t u_x = 0`` with ``u(x, 0) = φ(x)``.

    ``x³ + x − t²`` is constant along base characteristics.
    """
    r = x ** 3 + x - t * t
    R = 1.0 + abs(r)
    x0 = optimize.brentq(lambda z: z ** 3 + z - r, -R, R, xtol=1e-14)
    return float(np.asarray(phi(np.asarray(x0))))


def conserved_cubic_problem(phi: Curve, tau_lo: float = -2.0, tau_hi: float = 2.0) -> CharacteristicProblem:
    return CharacteristicProblem(
        lambda x, t, u: 2.0 * t,
        lambda x, t, u: 3.0 * x * x + 1.0,
        _const(0.0),
        lambda tau: tau,
        lambda tau: 0.0 * tau,
        phi,
        tau_lo,
        tau_hi,
        dx0=lambda tau: 1.0,
        dt0=lambda tau: 0.0,
        name="conserved-cubic",
    )


__all__ = [
    "CharacteristicError",
    "InversionError",
    "PostShockError",
    "CharacteristicProblem",
    "CharacteristicFamily",
    "CharacteristicPoints",
    "ShockReport",
    "integrate_family",
    "evaluate_solution",
    "detect_characteristic_points",
    "jacobian_shock_time",
    "burgers_implicit",
    "shock_time",
    "conserved_cubic_solution",
    "conserved_cubic_problem",
]
