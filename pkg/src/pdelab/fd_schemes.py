"""Finite-difference time stepping for the 1D heat, wave and first-order advection equations.

Unstable runs are not errors: once the infinity norm passes
``config.BLOWUP_THRESHOLD`` (or turns non-finite) stepping stops and the
step is recorded on :attr:`Evolution.blow_up`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import solve_banded

from . import atomic_io, config
from .grid import GridFunction, TimeAxis, UniformGrid1D, norm_l2, norm_linf, sample

logger = logging.getLogger(__name__)

TimeFn = Callable[[float], float]
SpaceTimeFn = Callable[[np.ndarray, float], np.ndarray]

PIVOT_TOL = 1e-14
EDGE_FRACTION = 0.05
EDGE_LEVEL = 1e-6


class SchemeError(ValueError):
    """Problem/scheme combination that cannot be stepped."""


def _as_time_fn(v: Union[float, TimeFn]) -> TimeFn:
    if callable(v):
        return v
    value = float(v)
    return lambda t: value


# ----------------------------------------------------------------------------
# Problem definitions
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Dirichlet:
    g: TimeFn


@dataclass(frozen=True)
class Neumann:
    """Prescribed ``u_x`` (not the outward normal derivative) at the endpoint."""

    g: TimeFn


Condition = Union[Dirichlet, Neumann]


@dataclass(frozen=True)
class BoundarySpec:
    lo: Condition
    hi: Condition

    @classmethod
    def dirichlet(cls, g_lo: Union[float, TimeFn] = 0.0, g_hi: Union[float, TimeFn] = 0.0) -> "BoundarySpec":
        return cls(Dirichlet(_as_time_fn(g_lo)), Dirichlet(_as_time_fn(g_hi)))

    @classmethod
    def neumann(cls, f: Union[float, TimeFn] = 0.0, g: Union[float, TimeFn] = 0.0) -> "BoundarySpec":
        return cls(Neumann(_as_time_fn(f)), Neumann(_as_time_fn(g)))

    @property
    def is_dirichlet(self) -> bool:
        return isinstance(self.lo, Dirichlet) and isinstance(self.hi, Dirichlet)

    @property
    def is_neumann(self) -> bool:
        return isinstance(self.lo, Neumann) and isinstance(self.hi, Neumann)


def _eval_source(rho: Optional[SpaceTimeFn], x: np.ndarray, t: float) -> np.ndarray:
    if rho is None:
        return np.zeros_like(x)
    return np.broadcast_to(np.asarray(rho(x, t), dtype=float), x.shape)


@dataclass(frozen=True)
class HeatProblem:
    """``u_t = c² u_xx + ρ(x,t) + R(u)`` with initial data φ."""

    diffusivity: float
    grid: UniformGrid1D
    time: TimeAxis
    initial: Callable[[np.ndarray], np.ndarray]
    boundary: BoundarySpec = field(default_factory=BoundarySpec.dirichlet)
    source: Optional[SpaceTimeFn] = None
    reaction: Optional[Callable[[np.ndarray], np.ndarray]] = None
    output_times: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.diffusivity > 0:
            raise SchemeError(f"diffusivity must be positive, got {self.diffusivity}")

    @property
    def s(self) -> float:
        return self.diffusivity * self.time.dt / self.grid.h ** 2


@dataclass(frozen=True)
class WaveProblem:
    """``u_tt = c² u_xx + ρ(x,t)`` with data φ, ψ and Dirichlet ends."""

    speed: float
    grid: UniformGrid1D
    time: TimeAxis
    initial: Callable[[np.ndarray], np.ndarray]
    velocity: Optional[Callable[[np.ndarray], np.ndarray]] = None
    boundary: BoundarySpec = field(default_factory=BoundarySpec.dirichlet)
    source: Optional[SpaceTimeFn] = None
    output_times: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.speed > 0:
            raise SchemeError(f"speed must be positive, got {self.speed}")

    @property
    def s(self) -> float:
        return (self.speed * self.time.dt / self.grid.h) ** 2


@dataclass(frozen=True)
class AdvectionProblem:
    """``a(x,t) u_t + b(x,t,u) u_x = ρ(x,t)``."""

    a: Callable[[np.ndarray, float], np.ndarray]
    b: Callable[[np.ndarray, float, np.ndarray], np.ndarray]
    grid: UniformGrid1D
    time: TimeAxis
    initial: Callable[[np.ndarray], np.ndarray]
    source: Optional[SpaceTimeFn] = None
    output_times: Tuple[float, ...] = ()

    @classmethod
    def constant(cls, a0: float, b0: float, grid: UniformGrid1D, time: TimeAxis, initial, **kw) -> "AdvectionProblem":
        return cls(
            a=lambda x, t: np.full_like(x, a0),
            b=lambda x, t, u: np.full_like(x, b0),
            grid=grid,
            time=time,
            initial=initial,
            **kw,
        )

    def courant(self) -> float:
        """|b k / (a h)| at t0 on the initial data."""
        x = self.grid.nodes
        u = sample(self.initial, self.grid).values
        ratio = np.asarray(self.b(x, self.time.t0, u)) / np.asarray(self.a(x, self.time.t0))
        return float(np.max(np.abs(ratio))) * self.time.dt / self.grid.h


# ----------------------------------------------------------------------------
# Results
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class BlowUp:
    step: int
    max_value: float


@dataclass
class Evolution:
    scheme: str
    grid: UniformGrid1D
    params: Dict[str, float] = field(default_factory=dict)
    snapshots: List[Tuple[float, GridFunction]] = field(default_factory=list)
    blow_up: Optional[BlowUp] = None
    max_norms: List[float] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def times(self) -> List[float]:
        return [t for t, _ in self.snapshots]

    @property
    def final(self) -> GridFunction:
        return self.snapshots[-1][1]

    def at(self, t: float) -> GridFunction:
        best = min(self.snapshots, key=lambda item: abs(item[0] - t))
        return best[1]

    def errors_against(self, exact: Callable[[np.ndarray, float], np.ndarray]) -> List[Dict[str, float]]:
        """Max and l2 error of every snapshot against ``exact(x, t)``."""
        out = []
        for t, gf in self.snapshots:
            ref = sample(lambda x: exact(x, t), self.grid)
            diff = gf - ref
            if np.all(np.isfinite(diff.values)):
                out.append({"t": t, "max": norm_linf(diff), "l2": norm_l2(diff)})
            else:
                out.append({"t": t, "max": math.inf, "l2": math.inf})
        return out

    def manifest(self, command: str = "", errors: Optional[List[Dict[str, float]]] = None) -> dict:
        return {
            "command": command or self.scheme,
            "scheme": self.scheme,
            "params": dict(self.params),
            "h": self.grid.h,
            "k": self.params.get("k"),
            "s": self.params.get("s"),
            "Q": self.params.get("Q"),
            "times": self.times,
            "blow_up": None if self.blow_up is None else {"step": self.blow_up.step, "max": self.blow_up.max_value},
            "errors": errors or [],
            "warnings": list(self.warnings),
        }

    def export(self, out_dir: Union[str, Path], *, command: str = "", errors=None, extra: Optional[dict] = None) -> Path:
        """One ``x,u`` CSV per snapshot, the per-step max norms and ``manifest.json``."""
        out_dir = Path(out_dir)
        files = []
        for idx, (t, gf) in enumerate(self.snapshots):
            name = f"snapshot_{idx:04d}.csv"
            gf.to_csv(out_dir / name)
            files.append(name)
        steps = np.arange(len(self.max_norms))
        atomic_io.write_table(out_dir / "max_norm.csv", ["step", "max_abs_u"], [steps, self.max_norms])
        payload = self.manifest(command, errors)
        payload["files"] = files
        payload["max_norm"] = "max_norm.csv"
        payload.update(extra or {})
        return atomic_io.write_json(out_dir / "manifest.json", payload)


class _Recorder:
    def __init__(self, scheme: str, grid: UniformGrid1D, time: TimeAxis, output_times: Sequence[float], params):
        self.time = time
        self.evolution = Evolution(scheme=scheme, grid=grid, params=dict(params))
        wanted = {0, time.n_steps}
        wanted.update(time.step_of(t) for t in output_times)
        self.steps = wanted
        self.threshold = config.BLOWUP_THRESHOLD

    def record(self, n: int, u: np.ndarray) -> bool:
        """Store step *n*; return False once the run has blown up."""
        with np.errstate(invalid="ignore"):
            peak = float(np.max(np.abs(u))) if u.size else 0.0
        self.evolution.max_norms.append(peak)
        exploded = not math.isfinite(peak) or peak > self.threshold
        if n in self.steps or exploded:
            self.evolution.snapshots.append((self.time.t(n), GridFunction(self.evolution.grid, u)))
        if exploded:
            self.evolution.blow_up = BlowUp(n, peak)
            logger.warning("%s: blow-up at step %d (max |u| = %.3g)", self.evolution.scheme, n, peak)
            return False
        return True


# ----------------------------------------------------------------------------
# Heat equation
# ----------------------------------------------------------------------------


def _require_dirichlet(boundary: BoundarySpec, entry: str, alt: str) -> None:
    if not boundary.is_dirichlet:
        raise SchemeError(f"{entry} needs Dirichlet boundaries; use {alt}")


def heat_explicit(problem: HeatProblem) -> Evolution:
    """Forward-time centred-space scheme, stable for s <= 1/2."""
    _require_dirichlet(problem.boundary, "heat_explicit", "heat_explicit_neumann")
    grid, time, s = problem.grid, problem.time, problem.s
    k = time.dt
    x = grid.nodes
    xi = x[1:-1]
    g_lo, g_hi = problem.boundary.lo.g, problem.boundary.hi.g
    rec = _Recorder("heat-explicit", grid, time, problem.output_times, {"s": s, "k": k, "h": grid.h, "Q": 0.0})

    u = sample(problem.initial, grid).values.copy()
    if not rec.record(0, u):
        return rec.evolution
    for n in range(time.n_steps):
        t = time.t(n)
        new = np.empty_like(u)
        new[1:-1] = s * (u[2:] + u[:-2]) + (1.0 - 2.0 * s) * u[1:-1] + k * _eval_source(problem.source, xi, t)
        if problem.reaction is not None:
            new[1:-1] += k * problem.reaction(u[1:-1])
        new[0] = g_lo(time.t(n + 1))
        new[-1] = g_hi(time.t(n + 1))
        u = new
        if not rec.record(n + 1, u):
            break
    return rec.evolution


def _thomas_pivots(diag: float, off: float, m: int) -> np.ndarray:
    d = np.empty(m)
    d[0] = diag
    for i in range(1, m):
        d[i] = diag - off * off / d[i - 1]
    return d


def heat_qscheme(problem: HeatProblem, Q: float) -> Evolution:
    """Weighted implicit scheme; Q=0 explicit, Q=1/2 Crank-Nicolson, Q=1 fully implicit."""
    if not 0.0 <= Q <= 1.0:
        raise SchemeError(f"Q must lie in [0, 1], got {Q}")
    _require_dirichlet(problem.boundary, "heat_qscheme", "heat_explicit_neumann")
    grid, time, s = problem.grid, problem.time, problem.s
    k = time.dt
    x = grid.nodes
    xi = x[1:-1]
    m = grid.n_cells - 1
    g_lo, g_hi = problem.boundary.lo.g, problem.boundary.hi.g
    name = "crank-nicolson" if Q == 0.5 else "qscheme"
    rec = _Recorder(name, grid, time, problem.output_times, {"s": s, "k": k, "h": grid.h, "Q": Q})

    diag, off = 1.0 + 2.0 * Q * s, -Q * s
    if m > 0:
        pivots = _thomas_pivots(diag, off, m)
        if np.min(np.abs(pivots)) < PIVOT_TOL:
            raise SchemeError(f"tridiagonal pivot below {PIVOT_TOL:g}")
    ab = np.zeros((3, max(m, 1)))
    ab[0, 1:] = off
    ab[1, :] = diag
    ab[2, :-1] = off
    e = (1.0 - Q) * s

    u = sample(problem.initial, grid).values.copy()
    if not rec.record(0, u):
        return rec.evolution
    for n in range(time.n_steps):
        t0, t1 = time.t(n), time.t(n + 1)
        new = np.empty_like(u)
        new[0], new[-1] = g_lo(t1), g_hi(t1)
        if m > 0:
            rhs = e * (u[2:] + u[:-2]) + (1.0 - 2.0 * e) * u[1:-1]
            if problem.source is not None:
                if Q == 0.0:
                    rhs += k * _eval_source(problem.source, xi, t0)
                else:
                    rhs += k * ((1.0 - Q) * _eval_source(problem.source, xi, t0)
                                + Q * _eval_source(problem.source, xi, t1))
            if problem.reaction is not None:
                rhs += k * problem.reaction(u[1:-1])
            rhs[0] += Q * s * new[0]
            rhs[-1] += Q * s * new[-1]
            new[1:-1] = rhs if Q == 0.0 else solve_banded((1, 1), ab, rhs)
        u = new
        if not rec.record(n + 1, u):
            break
    return rec.evolution


def crank_nicolson(problem: HeatProblem) -> Evolution:
    return heat_qscheme(problem, 0.5)


def heat_explicit_neumann(problem: HeatProblem) -> Evolution:
    """Explicit scheme with ghost points ``u_{-1} = u_1 - 2hf`` and ``u_{N+1} = u_{N-1} + 2hg``."""
    if not problem.boundary.is_neumann:
        raise SchemeError("heat_explicit_neumann needs Neumann conditions at both ends")
    grid, time, s = problem.grid, problem.time, problem.s
    k, h = time.dt, grid.h
    x = grid.nodes
    f_lo, g_hi = problem.boundary.lo.g, problem.boundary.hi.g
    rec = _Recorder("heat-neumann", grid, time, problem.output_times, {"s": s, "k": k, "h": h, "Q": 0.0})

    u = sample(problem.initial, grid).values.copy()
    if not rec.record(0, u):
        return rec.evolution
    for n in range(time.n_steps):
        t = time.t(n)
        padded = np.empty(u.size + 2)
        padded[1:-1] = u
        padded[0] = u[1] - 2.0 * h * f_lo(t)
        padded[-1] = u[-2] + 2.0 * h * g_hi(t)
        new = s * (padded[2:] + padded[:-2]) + (1.0 - 2.0 * s) * u + k * _eval_source(problem.source, x, t)
        if problem.reaction is not None:
            new += k * problem.reaction(u)
        u = new
        if not rec.record(n + 1, u):
            break
    return rec.evolution


def trapezoid_mass(gf: GridFunction) -> float:
    return float(np.dot(gf.grid.weights(), gf.values))


# ----------------------------------------------------------------------------
# Wave equation
# ----------------------------------------------------------------------------


def wave_leapfrog(problem: WaveProblem) -> Evolution:
    """Centred scheme with the second-order ghost-point first layer, stable for s <= 1."""
    _require_dirichlet(problem.boundary, "wave_leapfrog", "a Dirichlet boundary spec")
    grid, time, s = problem.grid, problem.time, problem.s
    k = time.dt
    x = grid.nodes
    xi = x[1:-1]
    g_lo, g_hi = problem.boundary.lo.g, problem.boundary.hi.g
    rec = _Recorder("wave-leapfrog", grid, time, problem.output_times, {"s": s, "k": k, "h": grid.h, "c": problem.speed})

    phi = sample(problem.initial, grid).values.copy()
    psi = sample(problem.velocity, grid).values if problem.velocity is not None else np.zeros_like(phi)
    if not rec.record(0, phi) or time.n_steps == 0:
        return rec.evolution

    u1 = np.empty_like(phi)
    u1[1:-1] = (0.5 * s * (phi[2:] + phi[:-2]) + (1.0 - s) * phi[1:-1] + k * psi[1:-1]
                + 0.5 * k * k * _eval_source(problem.source, xi, time.t(0)))
    u1[0], u1[-1] = g_lo(time.t(1)), g_hi(time.t(1))
    if not rec.record(1, u1):
        return rec.evolution

    prev, u = phi, u1
    for n in range(1, time.n_steps):
        new = np.empty_like(u)
        new[1:-1] = (s * (u[2:] + u[:-2]) + 2.0 * (1.0 - s) * u[1:-1] - prev[1:-1]
                     + k * k * _eval_source(problem.source, xi, time.t(n)))
        new[0], new[-1] = g_lo(time.t(n + 1)), g_hi(time.t(n + 1))
        prev, u = u, new
        if not rec.record(n + 1, u):
            break
    return rec.evolution


def discrete_wave_energy(u_prev: np.ndarray, u_next: np.ndarray, h: float, k: float, c: float) -> float:
    """Staggered energy conserved by the leapfrog scheme with clamped ends."""
    u_prev = np.asarray(u_prev, dtype=float)
    u_next = np.asarray(u_next, dtype=float)
    kinetic = 0.5 * h * np.sum(((u_next - u_prev) / k) ** 2)
    potential = 0.5 * c * c * h * np.sum(np.diff(u_next) * np.diff(u_prev)) / h ** 2
    return float(kinetic + potential)


# ----------------------------------------------------------------------------
# First-order advection
# ----------------------------------------------------------------------------


def _velocity(problem: AdvectionProblem, x: np.ndarray, t: float, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    a = np.broadcast_to(np.asarray(problem.a(x, t), dtype=float), x.shape)
    zero = np.flatnonzero(a == 0.0)
    if zero.size:
        raise SchemeError(f"coefficient a vanishes at x={x[zero[0]]:g}, t={t:g}")
    b = np.broadcast_to(np.asarray(problem.b(x, t, u), dtype=float), x.shape)
    return b / a, a


def advection_leapfrog(problem: AdvectionProblem) -> Evolution:
    """Centred leapfrog for ``a u_t + b u_x = ρ`` with ends pinned to zero.

    The first layer is one upwind Euler step. A warning is recorded when the
    solution reaches the outer 5% of the domain.
    """
    grid, time = problem.grid, problem.time
    k, h = time.dt, grid.h
    x = grid.nodes
    xi = x[1:-1]
    nu = problem.courant()
    rec = _Recorder("advection-leapfrog", grid, time, problem.output_times, {"k": k, "h": h, "nu": nu})
    edge = max(1, int(math.ceil(EDGE_FRACTION * grid.n_nodes)))
    warned = False

    def check_edges(u: np.ndarray, n: int) -> None:
        nonlocal warned
        if warned:
            return
        peak = np.max(np.abs(u))
        zone = max(np.max(np.abs(u[:edge])), np.max(np.abs(u[-edge:])))
        if peak > 0 and zone > EDGE_LEVEL * peak:
            warned = True
            msg = f"solution reached the boundary zone at step {n} (|u|={zone:.3g})"
            rec.evolution.warnings.append(msg)
            logger.warning("advection-leapfrog: %s", msg)

    u0 = sample(problem.initial, grid).values.copy()
    u0[0] = u0[-1] = 0.0
    if not rec.record(0, u0) or time.n_steps == 0:
        return rec.evolution

    v, a = _velocity(problem, xi, time.t(0), u0[1:-1])
    back = (u0[1:-1] - u0[:-2]) / h
    fwd = (u0[2:] - u0[1:-1]) / h
    u1 = np.zeros_like(u0)
    u1[1:-1] = u0[1:-1] - k * v * np.where(v > 0, back, fwd) + k * _eval_source(problem.source, xi, time.t(0)) / a
    check_edges(u1, 1)
    if not rec.record(1, u1):
        return rec.evolution

    prev, u = u0, u1
    for n in range(1, time.n_steps):
        t = time.t(n)
        v, a = _velocity(problem, xi, t, u[1:-1])
        new = np.zeros_like(u)
        new[1:-1] = prev[1:-1] - (k / h) * v * (u[2:] - u[:-2]) + 2.0 * k * _eval_source(problem.source, xi, t) / a
        prev, u = u, new
        check_edges(u, n + 1)
        if not rec.record(n + 1, u):
            break
    return rec.evolution


def max_gradient(gf: GridFunction) -> float:
    return float(np.max(np.abs(np.diff(gf.values)))) / gf.grid.h


# ----------------------------------------------------------------------------
# Manufactured solutions and refinement studies
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ManufacturedSolution:
    """Exact field with the derivatives needed to build a matching source."""

    u: SpaceTimeFn
    u_t: SpaceTimeFn
    u_x: SpaceTimeFn
    u_xx: SpaceTimeFn
    u_tt: Optional[SpaceTimeFn] = None
    name: str = "manufactured"


@dataclass(frozen=True)
class ManufacturedProblem:
    solution: ManufacturedSolution
    source: SpaceTimeFn
    phi: Callable[[np.ndarray], np.ndarray]
    psi: Callable[[np.ndarray], np.ndarray]

    def boundary(self, grid: UniformGrid1D) -> BoundarySpec:
        u = self.solution.u
        lo = np.array([grid.x_lo])
        hi = np.array([grid.x_hi])
        return BoundarySpec.dirichlet(lambda t: float(u(lo, t)[0]), lambda t: float(u(hi, t)[0]))


def mms_residual_source(solution: ManufacturedSolution, tag: str, coefficient: float = 1.0) -> ManufacturedProblem:
    """Source that makes *solution* exact for ``tag`` in {"heat", "wave"}.

    ``coefficient`` is the diffusivity c² for heat and the speed c for the wave.
    """
    sol = solution
    if tag == "heat":
        source = lambda x, t: sol.u_t(x, t) - coefficient * sol.u_xx(x, t)
    elif tag == "wave":
        if sol.u_tt is None:
            raise SchemeError("wave manufactured source needs u_tt")
        c2 = coefficient * coefficient
        source = lambda x, t: sol.u_tt(x, t) - c2 * sol.u_xx(x, t)
    else:
        raise SchemeError(f"unknown equation tag {tag!r}")
    return ManufacturedProblem(
        solution=sol,
        source=source,
        phi=lambda x: sol.u(x, 0.0),
        psi=lambda x: sol.u_t(x, 0.0),
    )


def oscillating_gaussian(a: float = 1.0, b: float = 4.0, x0: float = 0.5, omega: float = 2.0) -> ManufacturedSolution:
    """``a exp(-b (x - x0 cos ωt)²)``."""

    def parts(x, t):
        xi = x - x0 * np.cos(omega * t)
        return xi, a * np.exp(-b * xi * xi)

    def u(x, t):
        return parts(x, t)[1]

    def u_t(x, t):
        xi, val = parts(x, t)
        return -2.0 * b * xi * (x0 * omega * np.sin(omega * t)) * val

    def u_tt(x, t):
        xi, val = parts(x, t)
        xi_t = x0 * omega * np.sin(omega * t)
        xi_tt = x0 * omega * omega * np.cos(omega * t)
        return (4.0 * b * b * xi * xi * xi_t * xi_t - 2.0 * b * xi_t * xi_t - 2.0 * b * xi * xi_tt) * val

    def u_x(x, t):
        xi, val = parts(x, t)
        return -2.0 * b * xi * val

    def u_xx(x, t):
        xi, val = parts(x, t)
        return (4.0 * b * b * xi * xi - 2.0 * b) * val

    return ManufacturedSolution(u, u_t, u_x, u_xx, u_tt, name=f"oscillating-gaussian({a:g},{b:g},{x0:g},{omega:g})")


def decaying_sine(l: float = 1.0) -> ManufacturedSolution:
    """``exp(-t) sin(πx/l)``."""
    w = np.pi / l
    u = lambda x, t: np.exp(-t) * np.sin(w * x)
    return ManufacturedSolution(
        u=u,
        u_t=lambda x, t: -u(x, t),
        u_x=lambda x, t: w * np.exp(-t) * np.cos(w * x),
        u_xx=lambda x, t: -w * w * u(x, t),
        u_tt=u,
        name="decaying-sine",
    )


def boundary_matched_family(
    l: float,
    h: Callable, h_t: Callable, h_x: Callable, h_xx: Callable,
    f: TimeFn, df: TimeFn, g: TimeFn, dg: TimeFn,
) -> ManufacturedSolution:
    """``u = (h/l)(x g/h(l,t) + (l-x) f/h(0,t))``, equal to f at x=0 and g at x=l.

    *h* and its derivatives take ``(x, t)``; *f*, *g* take ``t``. ``h`` must not
    vanish at the endpoints.
    """

    def ends(t):
        zero, end = np.array([0.0]), np.array([float(l)])
        H0, Hl = float(h(zero, t)[0]), float(h(end, t)[0])
        H0t, Hlt = float(h_t(zero, t)[0]), float(h_t(end, t)[0])
        return H0, Hl, H0t, Hlt

    def P(x, t):
        H0, Hl, _, _ = ends(t)
        return x * g(t) / Hl + (l - x) * f(t) / H0

    def P_t(x, t):
        H0, Hl, H0t, Hlt = ends(t)
        return x * (dg(t) * Hl - g(t) * Hlt) / Hl ** 2 + (l - x) * (df(t) * H0 - f(t) * H0t) / H0 ** 2

    def P_x(t):
        H0, Hl, _, _ = ends(t)
        return g(t) / Hl - f(t) / H0

    return ManufacturedSolution(
        u=lambda x, t: h(x, t) * P(x, t) / l,
        u_t=lambda x, t: (h_t(x, t) * P(x, t) + h(x, t) * P_t(x, t)) / l,
        u_x=lambda x, t: (h_x(x, t) * P(x, t) + h(x, t) * P_x(t)) / l,
        u_xx=lambda x, t: (h_xx(x, t) * P(x, t) + 2.0 * h_x(x, t) * P_x(t)) / l,
        name="boundary-matched",
    )


@dataclass
class RefinementTable:
    levels: List[int]
    errors: List[float]

    @property
    def orders(self) -> List[float]:
        return observed_orders(self.errors)

    def rows(self) -> List[Dict[str, float]]:
        orders = [math.nan] + self.orders
        return [{"n": n, "error": e, "order": o} for n, e, o in zip(self.levels, self.errors, orders)]


def observed_orders(errors: Sequence[float], ratio: float = 2.0) -> List[float]:
    return [math.log(e0 / e1) / math.log(ratio) for e0, e1 in zip(errors[:-1], errors[1:])]


def refinement_study(run: Callable[[int], float], levels: Sequence[int], *, progress=None) -> RefinementTable:
    """Evaluate ``run(n)`` (an error norm at resolution n) over dyadic *levels*."""
    it = progress(levels) if progress is not None else levels
    errors = [float(run(n)) for n in it]
    table = RefinementTable(list(levels), errors)
    logger.info("refinement orders: %s", ", ".join(f"{o:.3f}" for o in table.orders))
    return table


__all__ = [
    "SchemeError",
    "Dirichlet",
    "Neumann",
    "BoundarySpec",
    "HeatProblem",
    "WaveProblem",
    "AdvectionProblem",
    "BlowUp",
    "Evolution",
    "heat_explicit",
    "heat_qscheme",
    "crank_nicolson",
    "heat_explicit_neumann",
    "trapezoid_mass",
    "wave_leapfrog",
    "discrete_wave_energy",
    "advection_leapfrog",
    "max_gradient",
    "ManufacturedSolution",
    "ManufacturedProblem",
    "mms_residual_source",
    "oscillating_gaussian",
    "decaying_sine",
    "boundary_matched_family",
    "RefinementTable",
    "observed_orders",
    "refinement_study",
]
