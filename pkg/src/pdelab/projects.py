"""Project harnesses: each run fills a report directory with configs, CSV tables,
evolution manifests and a ``summary.json`` of pass/fail gates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import optimize

from . import atomic_io
from .characteristics import (
    CharacteristicProblem,
    conserved_cubic_problem,
    conserved_cubic_solution,
    evaluate_solution,
    integrate_family,
    jacobian_shock_time,
    shock_time,
)
from .config import RunConfig
from .fd_schemes import (
    AdvectionProblem,
    BoundarySpec,
    HeatProblem,
    WaveProblem,
    advection_leapfrog,
    boundary_matched_family,
    crank_nicolson,
    heat_explicit,
    max_gradient,
    mms_residual_source,
    oscillating_gaussian,
    refinement_study,
    wave_leapfrog,
)
from .grid import TimeAxis, UniformGrid1D, inner_product, sample
from .oracles import heat_series
from .profiles import parse_profile
from .spectral import (
    ModeSet,
    galerkin_couplings,
    nonlinear_heat_galerkin,
    riccati_single_mode,
    solve_heat_lifted,
    stationary_limit,
)
from .vonneumann import BUILTIN_SYMBOLS, scheme_stability, stability_threshold

logger = logging.getLogger(__name__)

Progress = Optional[Callable[..., Any]]


@dataclass(frozen=True)
class Gate:
    name: str
    passed: bool
    value: Any
    threshold: str
    note: str = ""

    def as_dict(self) -> dict:
        value = self.value
        if isinstance(value, float) and not math.isfinite(value):
            value = str(value)
        out = {"name": self.name, "passed": self.passed, "value": value, "threshold": self.threshold}
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Report:
    """Gate ledger and artifact sink for one run."""

    project: str
    out_dir: Path
    gates: List[Gate] = field(default_factory=list)
    tables: List[dict] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)

    def check(self, name: str, passed: bool, value: Any, threshold: str, note: str = "") -> bool:
        gate = Gate(name, bool(passed), value, threshold, note)
        self.gates.append(gate)
        logger.info("gate %s: %s (%s, needs %s)", name, "pass" if gate.passed else "FAIL", value, threshold)
        return gate.passed

    def within(self, name: str, value: float, expected: float, tol: float, *, relative: bool = False) -> bool:
        err = abs(value - expected)
        if relative:
            err /= abs(expected)
        kind = "relative" if relative else "absolute"
        return self.check(name, math.isfinite(err) and err <= tol, float(value),
                          f"{kind} distance to {expected:.12g} <= {tol:g}")

    def below(self, name: str, value: float, bound: float) -> bool:
        return self.check(name, math.isfinite(value) and value < bound, float(value), f"< {bound:g}")

    def table(self, name: str, header: Sequence[str], columns, *, title: str = "", logy: bool = False) -> Path:
        path = atomic_io.write_table(self.out_dir / name, header, columns)
        self.tables.append({"file": name, "columns": len(header), "title": title or name, "logy": logy})
        return path

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.gates)

    def failures(self) -> List[dict]:
        return [g.as_dict() for g in self.gates if not g.passed]

    def write(self, config: Optional[RunConfig] = None) -> Path:
        if config is not None:
            atomic_io.write_json(self.out_dir / "config.json", config.as_dict())
        if self.tables:
            atomic_io.write_json(self.out_dir / "manifest.json", {"command": self.project, "tables": self.tables})
        payload = {
            "project": self.project,
            "passed": self.passed,
            "gates": [g.as_dict() for g in self.gates],
            "failures": self.failures(),
            "notes": self.notes,
        }
        return atomic_io.write_json(self.out_dir / "summary.json", payload)


def _iterate(progress: Progress, items, desc: str):
    return progress(items, desc=desc) if progress is not None else items


def _final_error(evolution, exact) -> float:
    return evolution.errors_against(exact)[-1]["max"]


# ----------------------------------------------------------------------------
# Project 1: explicit schemes, stability thresholds and manufactured solutions
# ----------------------------------------------------------------------------


def heat_stability_runs(report: Report, cfg: RunConfig) -> None:
    """Explicit heat scheme on the hat profile at s just below and above 1/2."""
    hat = parse_profile("hat")
    grid = UniformGrid1D(0.0, 1.0, cfg.get_int("heat_N", 50, minimum=4))
    series = heat_series(hat, 1.0, 1.0, K=cfg.get_int("K", 200, minimum=1))
    exact = lambda x, t: series(x, t)
    rows = []
    results = {}
    for s, steps in ((0.49, 100), (0.51, 100), (0.51, 400)):
        problem = HeatProblem(1.0, grid, TimeAxis(s * grid.h ** 2, steps), hat)
        evo = heat_explicit(problem)
        errors = evo.errors_against(exact)
        evo.export(report.out_dir / f"heat_s{s:.2f}_n{steps}", command="project1 heat", errors=errors)
        err = errors[-1]["max"]
        results[(s, steps)] = (err, evo.blow_up is not None)
        rows.append((s, steps, err if math.isfinite(err) else 1e300, float(evo.blow_up is not None)))
    report.table("heat_stability.csv", ["s", "steps", "max_error", "blow_up"], list(zip(*rows)))
    report.below("heat explicit s=0.49 max error", results[(0.49, 100)][0], 0.02)
    err, _ = results[(0.51, 100)]
    report.check("heat explicit s=0.51 leaves the stable error bound", not err < 0.02, err, ">= 0.02 after 100 steps")
    err, blew = results[(0.51, 400)]
    report.check("heat explicit s=0.51 diverges", blew or not err <= 1.0, err, "blow-up or error > 1 by 400 steps")


def stability_thresholds(report: Report) -> None:
    s_heat = stability_threshold(BUILTIN_SYMBOLS["heat-explicit"], 0.1, 1.0)
    s_wave = stability_threshold(BUILTIN_SYMBOLS["wave-leapfrog"], 0.5, 2.0)
    report.within("heat explicit stability threshold", s_heat, 0.5, 1e-6)
    report.within("wave leapfrog stability threshold", s_wave, 1.0, 1e-6)
    cn = BUILTIN_SYMBOLS["crank-nicolson"]
    for s in (1.0, 10.0, 100.0):
        verdict = scheme_stability(cn, {"s": s})
        report.check(f"crank-nicolson stable at s={s:g}", verdict.stable, verdict.classification, "stable")


def travelling_gaussian(report: Report, cfg: RunConfig) -> None:
    """Leapfrog on a Gaussian pulse against d'Alembert's solution."""
    a = cfg.get_float("gauss_a", 5.0)
    length = 20.0
    phi = parse_profile(f"gaussian(1,{a!r},{length / 2!r})")
    grid = UniformGrid1D(0.0, length, cfg.get_int("wave_N", 200, minimum=4))
    exact = lambda x, t: 0.5 * (phi(x + t) + phi(x - t))
    runs = {}
    for s, steps in ((0.9, 60), (1.1, 60), (1.1, 300)):
        problem = WaveProblem(1.0, grid, TimeAxis(grid.h * math.sqrt(s), steps), phi)
        evo = wave_leapfrog(problem)
        errors = evo.errors_against(exact)
        evo.export(report.out_dir / f"wave_s{s:.2f}_n{steps}", command="project1 wave", errors=errors)
        runs[(s, steps)] = (errors[-1]["max"], evo.blow_up)
    report.below("wave leapfrog s=0.9 max error", runs[(0.9, 60)][0], 0.02)
    report.notes["wave s=1.1 error after 60 steps"] = runs[(1.1, 60)][0]
    blow = runs[(1.1, 300)][1]
    report.check("wave leapfrog s=1.1 blows up", blow is not None,
                 None if blow is None else blow.step, "blow-up within 300 steps")


def _orders_gate(report: Report, name: str, table, lo: float = 1.8, hi: float = 2.2) -> None:
    report.table(f"{name.replace(' ', '_')}.csv", ["n", "error"], [table.levels, table.errors], title=name, logy=True)
    orders = table.orders
    report.check(f"{name} observed orders", all(lo <= o <= hi for o in orders), [round(o, 4) for o in orders],
                 f"each in [{lo}, {hi}]")


def wave_mms(report: Report, cfg: RunConfig, progress: Progress = None) -> None:
    """Oscillating Gaussian manufactured solution for the leapfrog scheme on [-1, 1]."""
    solution = oscillating_gaussian(1.0, 4.0, 0.5, 2.0)
    mp = mms_residual_source(solution, "wave", 1.0)
    t_end = 1.0

    def run(n: int) -> float:
        grid = UniformGrid1D(-1.0, 1.0, n)
        k = 0.5 * grid.h
        steps = int(round(t_end / k))
        problem = WaveProblem(1.0, grid, TimeAxis(k, steps), mp.phi, mp.psi, mp.boundary(grid), mp.source)
        return _final_error(wave_leapfrog(problem), solution.u)

    levels = cfg.get_floats("mms_levels", (40, 80, 160, 320))
    table = refinement_study(run, [int(n) for n in levels], progress=progress)
    _orders_gate(report, "wave mms", table)


def driven_string(report: Report, cfg: RunConfig) -> None:
    """``u(-l, t) = sin ωt`` at s = 1; before the front reflects the scheme is exact."""
    l, omega = 1.0, cfg.get_float("omega", 2.0 * math.pi)
    grid = UniformGrid1D(-l, l, cfg.get_int("string_N", 200, minimum=4))
    steps = int(round(1.5 * l / grid.h))
    problem = WaveProblem(
        1.0, grid, TimeAxis(grid.h, steps), lambda x: np.zeros_like(x),
        boundary=BoundarySpec.dirichlet(lambda t: math.sin(omega * t), 0.0),
        output_times=(0.5 * l, l, 1.5 * l),
    )
    evo = wave_leapfrog(problem)
    exact = lambda x, t: np.where(t - (x + l) > 0.0, np.sin(omega * (t - (x + l))), 0.0)
    errors = evo.errors_against(exact)
    evo.export(report.out_dir / "driven_string", command="project1 driven-string", errors=errors)
    report.below("driven string matches the incoming wave", max(e["max"] for e in errors), 1e-9)


def run_project1(cfg: RunConfig, progress: Progress = None) -> Report:
    report = Report("project1", cfg.out_dir)
    heat_stability_runs(report, cfg)
    stability_thresholds(report)
    travelling_gaussian(report, cfg)
    wave_mms(report, cfg, progress)
    driven_string(report, cfg)
    report.write(cfg)
    return report


# ----------------------------------------------------------------------------
# Project 2: first-order equations, characteristics and shocks
# ----------------------------------------------------------------------------


def advection_transport(report: Report, cfg: RunConfig) -> None:
    nu = cfg.get_float("nu", 0.5)
    phi = parse_profile("gaussian(1,1,-3)")
    grid = UniformGrid1D(-10.0, 10.0, 400)
    t_end = 4.0
    k = nu * grid.h
    steps = int(round(t_end / k))
    problem = AdvectionProblem.constant(1.0, 1.0, grid, TimeAxis(t_end / steps, steps), phi)
    evo = advection_leapfrog(problem)
    errors = evo.errors_against(lambda x, t: phi(x - t))
    evo.export(report.out_dir / "transport", command="project2 transport", errors=errors)
    report.below("advection leapfrog transport max error", errors[-1]["max"], 0.02)
    nu_star = stability_threshold(BUILTIN_SYMBOLS["advection-leapfrog"], 0.5, 1.5)
    report.within("advection leapfrog stability threshold", nu_star, 1.0, 1e-6)


def conserved_cubic(report: Report, cfg: RunConfig) -> None:
    """``(3x² + 1) u_t + 2t u_x = 0`` by leapfrog and by characteristics."""
    phi = parse_profile("gaussian(1,1,0)")
    t_end = 1.0
    grid = UniformGrid1D(-3.0, 3.0, 1200)
    vmax = 2.0 * t_end
    steps = int(math.ceil(t_end * vmax / (0.5 * grid.h)))
    problem = AdvectionProblem(
        a=lambda x, t: 3.0 * x * x + 1.0,
        b=lambda x, t, u: np.full_like(x, 2.0 * t),
        grid=grid,
        time=TimeAxis(t_end / steps, steps),
        initial=phi,
    )
    evo = advection_leapfrog(problem)
    exact = lambda x, t: np.array([conserved_cubic_solution(phi, float(xi), t) for xi in np.atleast_1d(x)])
    errors = evo.errors_against(exact)
    evo.export(report.out_dir / "conserved_cubic", command="project2 conserved-cubic", errors=errors)
    report.below("conserved cubic leapfrog max error", errors[-1]["max"], 0.02)

    family = integrate_family(conserved_cubic_problem(phi, -1.0, 1.0), n_tau=201, n_s=400, s_max=0.8)
    family.to_csv(report.out_dir / "conserved_cubic_family.csv")
    t_eval = 0.8
    worst = 0.0
    for x in (0.0, 0.3, 0.6):
        worst = max(worst, abs(evaluate_solution(family, x, t_eval) - conserved_cubic_solution(phi, x, t_eval)))
    report.below("characteristic family vs conserved quantity", worst, 1e-6)


# expected t*; "tent" is 1 - |x|
SHOCK_CASES = (
    ("tent", (-2.0, 2.0), 1.0),
    ("runge", (-5.0, 5.0), 8.0 * math.sqrt(3.0) / 9.0),
    ("sech", (-5.0, 5.0), 2.0),
    ("sin(1,3.141592653589793)", (0.0, 2.0 * math.pi), 1.0),
    ("linear(-1,0)", (-2.0, 2.0), 1.0),
)


def _golden_shock_time(profile, lo: float, hi: float) -> float:
    """Independent check: golden-section search for the steepest descent of φ."""
    xs = np.linspace(lo, hi, 4001)
    slopes = np.asarray(profile.derivative(xs), dtype=float)
    i = int(np.argmin(slopes))
    if slopes[i] >= 0:
        return math.inf
    if not 0 < i < xs.size - 1 or not (slopes[i] < slopes[i - 1] and slopes[i] < slopes[i + 1]):
        return -1.0 / float(slopes[i])
    res = optimize.minimize_scalar(lambda z: float(profile.derivative(z)), bracket=(xs[i - 1], xs[i], xs[i + 1]),
                                   method="golden", tol=1e-10)
    return -1.0 / min(float(res.fun), float(slopes[i]))


def shock_table(report: Report, cfg: RunConfig) -> None:
    rows = []
    for idx, (name, (lo, hi), expected) in enumerate(SHOCK_CASES):
        profile = parse_profile(name)
        analytic = shock_time(profile, profile.derivative, lo, hi)
        report.within(f"shock time {profile.name}", analytic.t_star, expected, 1e-8)
        golden = _golden_shock_time(profile, lo, hi)
        report.within(f"shock time {profile.name} vs golden-section search", analytic.t_star, golden, 1e-8)
        family = integrate_family(CharacteristicProblem.burgers(profile, lo, hi), n_tau=801, n_s=300,
                                  s_max=1.5 * expected)
        detected = jacobian_shock_time(family)
        report.within(f"Jacobian breakdown {profile.name}", detected.t_star, expected, 0.05, relative=True)
        rows.append((idx, expected, analytic.t_star, detected.t_star))
    report.table("shock_times.csv", ["case", "expected", "analytic", "jacobian"], list(zip(*rows)))
    report.notes["shock cases"] = [name for name, _, _ in SHOCK_CASES]


def burgers_gradient_detection(report: Report, cfg: RunConfig) -> None:
    """Leapfrog on Burgers with the tent: the first time ``max|u_x| > 50`` should be near t* = 1."""
    tent = parse_profile("tent")
    grid = UniformGrid1D(-2.0, 3.0, cfg.get_int("burgers_N", 1000, minimum=100))
    k = 0.5 * grid.h
    steps = int(round(1.05 / k))
    times = tuple(n * k for n in range(steps + 1))
    problem = AdvectionProblem(
        a=lambda x, t: np.ones_like(x),
        b=lambda x, t, u: u,
        grid=grid,
        time=TimeAxis(k, steps),
        initial=tent,
        output_times=times,
    )
    evo = advection_leapfrog(problem)
    grads = [(t, max_gradient(gf)) for t, gf in evo.snapshots]
    report.table("burgers_max_gradient.csv", ["t", "max_abs_u_x"], list(zip(*grads)), logy=True)
    hit = next((t for t, g in grads if not g <= 50.0), math.inf)
    report.within("leapfrog gradient blow-up time (tent)", hit, 1.0, 0.05, relative=True)


def run_project2(cfg: RunConfig, progress: Progress = None) -> Report:
    report = Report("project2", cfg.out_dir)
    steps = [advection_transport, conserved_cubic, shock_table, burgers_gradient_detection]
    for step in _iterate(progress, steps, "project2"):
        step(report, cfg)
    report.write(cfg)
    return report


# ----------------------------------------------------------------------------
# Project 3: finite Fourier transform and the nonlinear source
# ----------------------------------------------------------------------------


def lifted_heat_comparison(report: Report, cfg: RunConfig) -> None:
    """Crank-Nicolson against the lifted mode solution for moving boundary data."""
    g1, dg1 = (lambda t: math.sin(2.0 * t)), (lambda t: 2.0 * math.cos(2.0 * t))
    g2, dg2 = (lambda t: t * math.exp(-t)), (lambda t: (1.0 - t) * math.exp(-t))
    f = lambda x: np.sin(np.pi * x)
    source = lambda x, t: x * (1.0 - x)
    t_end = 0.5
    grid = UniformGrid1D(0.0, 1.0, cfg.get_int("lift_N", 100, minimum=4))
    k = 0.5 * grid.h
    steps = int(round(t_end / k))
    problem = HeatProblem(1.0, grid, TimeAxis(t_end / steps, steps), f, BoundarySpec.dirichlet(g1, g2), source)
    fd = crank_nicolson(problem).final
    spectral = solve_heat_lifted(f, g1, g2, t_end, dg1=dg1, dg2=dg2, K=cfg.get_int("K", 50, minimum=1), source=source)
    ref = sample(spectral, grid)
    report.table("lifted_heat.csv", ["x", "crank_nicolson", "spectral"], [grid.nodes, fd.values, ref.values])
    report.below("crank-nicolson vs lifted spectral", float(np.max(np.abs(fd.values - ref.values))), 2e-3)


def heat_mms(report: Report, cfg: RunConfig, progress: Progress = None) -> None:
    """Boundary-matched manufactured solution for Crank-Nicolson."""
    solution = boundary_matched_family(
        1.0,
        lambda x, t: np.exp(-t) * np.cos(x),
        lambda x, t: -np.exp(-t) * np.cos(x),
        lambda x, t: -np.exp(-t) * np.sin(x),
        lambda x, t: -np.exp(-t) * np.cos(x),
        lambda t: 1.0 + 0.5 * math.sin(2.0 * t), lambda t: math.cos(2.0 * t),
        lambda t: math.cos(t), lambda t: -math.sin(t),
    )
    mp = mms_residual_source(solution, "heat", 1.0)
    t_end = 0.5

    def run(n: int) -> float:
        grid = UniformGrid1D(0.0, 1.0, n)
        k = 0.5 * grid.h
        steps = int(round(t_end / k))
        problem = HeatProblem(1.0, grid, TimeAxis(t_end / steps, steps), mp.phi, mp.boundary(grid), mp.source)
        return _final_error(crank_nicolson(problem), solution.u)

    levels = cfg.get_floats("mms_levels", (20, 40, 80, 160))
    table = refinement_study(run, [int(n) for n in levels], progress=progress)
    _orders_gate(report, "crank-nicolson mms", table)


SWEEP = (0.5, 2.0, 3.5, 6.0)


def _initial_modes(K: int, amplitude: float) -> np.ndarray:
    return amplitude / np.arange(1, K + 1)


def galerkin_checks(report: Report) -> None:
    a111 = float(galerkin_couplings(1)[0, 0, 0, 0])
    report.within("coupling a_1^{111}", a111, 3.0 / (2.0 * math.pi), 1e-10)
    traj = nonlinear_heat_galerkin(2.0, 1.0, [0.1], 1, 5.0)
    closed = riccati_single_mode(2.0, 1.0, 0.1, traj.times)
    report.below("single-mode Galerkin vs Riccati closed form", float(np.max(np.abs(traj.mode(1) - closed))), 1e-6)


def nonlinear_sweep(report: Report, cfg: RunConfig, progress: Progress = None) -> None:
    """Galerkin and finite-difference runs of ``u_t = u_xx + λ̂ u (1 − ε² u²)`` on (0, π)."""
    K = cfg.get_int("K", 5, minimum=1)
    eps = cfg.get_float("eps", 1.0)
    amp = cfg.get_float("amplitude", 0.1)
    t_end = cfg.get_float("t_end", 30.0)
    N0 = _initial_modes(K, amp)
    modes = ModeSet.sine(K, math.pi)
    m1 = ModeSet.sine(1, math.pi).functions[0]
    grid = UniformGrid1D(0.0, math.pi, cfg.get_int("fd_N", 40, minimum=4))
    u0 = lambda x: modes(x) @ N0
    m1_grid = sample(m1, grid)

    rows = []
    outcome = {}
    for lam_hat in _iterate(progress, SWEEP, "lambda sweep"):
        traj = nonlinear_heat_galerkin(lam_hat, eps, N0, K, t_end)
        traj.as_coefficients().to_csv(report.out_dir / f"galerkin_lambda{lam_hat:g}.csv")
        k = 0.4 * grid.h ** 2
        steps = int(math.ceil(t_end / k))
        problem = HeatProblem(1.0, grid, TimeAxis(t_end / steps, steps), u0,
                              reaction=lambda u, lh=lam_hat: lh * u * (1.0 - eps * eps * u * u))
        evo = heat_explicit(problem)
        evo.export(report.out_dir / f"fd_lambda{lam_hat:g}", command=f"project3 reaction lambda={lam_hat:g}")
        fd_n1 = inner_product(evo.final, m1_grid)
        limit = stationary_limit(lam_hat, eps)
        outcome[lam_hat] = (traj, evo, fd_n1, limit)
        rows.append((lam_hat, float(traj.final[0]), fd_n1, limit, float(np.max(np.abs(evo.final.values)))))
        report.notes[f"lambda={lam_hat:g} final modes"] = [float(v) for v in traj.final]
    report.table("nonlinear_sweep.csv", ["lambda_hat", "galerkin_N1", "fd_N1", "single_mode_limit", "fd_max_abs_u"],
                 list(zip(*rows)))

    traj, evo, _, _ = outcome[0.5]
    report.below("lambda=0.5 Galerkin decays", float(np.max(np.abs(traj.final))), 1e-3 * float(np.max(np.abs(N0))))
    start = float(np.max(np.abs(evo.snapshots[0][1].values)))
    report.below("lambda=0.5 finite differences decay", float(np.max(np.abs(evo.final.values))), 1e-3 * start)
    for lam_hat in (2.0, 3.5):
        traj, evo, fd_n1, limit = outcome[lam_hat]
        report.within(f"lambda={lam_hat:g} Galerkin saturation", float(traj.final[0]), limit, 0.05, relative=True)
        report.within(f"lambda={lam_hat:g} finite differences vs Galerkin", fd_n1, float(traj.final[0]), 0.05,
                      relative=True)
    traj, evo, fd_n1, _ = outcome[6.0]
    report.notes["lambda=6 (two unstable modes)"] = {
        "galerkin_final": [float(v) for v in traj.final],
        "fd_N1": fd_n1,
        "blow_up": traj.blow_up,
    }


def run_project3(cfg: RunConfig, progress: Progress = None) -> Report:
    report = Report("project3", cfg.out_dir)
    lifted_heat_comparison(report, cfg)
    heat_mms(report, cfg, progress)
    galerkin_checks(report)
    nonlinear_sweep(report, cfg, progress)
    report.write(cfg)
    return report


PROJECTS = {
    "project1": run_project1,
    "project2": run_project2,
    "project3": run_project3,
}


__all__ = [
    "Gate",
    "Report",
    "SHOCK_CASES",
    "SWEEP",
    "run_project1",
    "run_project2",
    "run_project3",
    "PROJECTS",
]
