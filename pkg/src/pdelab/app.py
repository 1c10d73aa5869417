"""pdelab command-line front end.

Every subcommand builds a :class:`~pdelab.config.RunConfig` (config file, then
``--set`` overrides, then dedicated flags), runs one solver or analysis, writes
its artifacts under the run's output directory and finishes with a
``summary.json`` of pass/fail gates. The exit code is 0 when every gate
passes, 1 when a gate fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import functools
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from tqdm import tqdm

from . import atomic_io, config
from .characteristics import (
    CharacteristicError,
    CharacteristicProblem,
    burgers_implicit,
    conserved_cubic_problem,
    conserved_cubic_solution,
    detect_characteristic_points,
    integrate_family,
    jacobian_shock_time,
    shock_time,
)
from .classify import (
    ClassificationError,
    SecondOrderPDE2,
    canonical_transform_constant,
    characteristic_families_constant,
    classify2,
    classify_ndim,
)
from .config import ConfigError, RunConfig
from .fd_schemes import (
    AdvectionProblem,
    BoundarySpec,
    Evolution,
    HeatProblem,
    SchemeError,
    WaveProblem,
    advection_leapfrog,
    crank_nicolson,
    heat_explicit,
    heat_explicit_neumann,
    heat_qscheme,
    max_gradient,
    wave_leapfrog,
)
from .grid import GridError, TimeAxis, UniformGrid1D, norm_linf, sample
from .linalg_iter import (
    DivergenceError,
    ZeroDiagonalError,
    assemble_laplace_2d,
    predicted_iteration_count,
    predicted_spectral_radius,
    solve_iterative,
)
from .oracles import (
    OracleError,
    SturmLiouville,
    cauchy_heat,
    dalembert,
    erf_solution,
    halfline_heat,
    halfline_wave,
    heat_series,
    image_series_heat,
    laplace_halfplane,
    laplace_rectangle_series,
    sl_shoot,
    wave_series,
)
from .plotting import write_plot_script
from .profiles import ProfileError
from .projects import PROJECTS, Report
from .spectral import (
    ModeSet,
    SpectralError,
    forward,
    inverse,
    nonlinear_heat_galerkin,
    resonance_sweep,
    solve_parabolic_modes,
    stationary_limit,
)
from .stationary_phase import DegenerateStationaryPointError, kg_farfield, kg_mode_superposition
from .vonneumann import (
    BUILTIN_SYMBOLS,
    DispersionError,
    PDECoefficients,
    SymbolError,
    classify_mode_type,
    dispersion,
    scheme_stability,
    stability_index,
    stability_threshold,
)

__title__ = "pdelab"
__version__ = "1.0.0"

logger = logging.getLogger("pdelab")

# =========================== Helpers ==========================================
CYAN = "\033[1;36m"
PURPLE = "\033[1;35m"
GREEN = "\033[1;32m"
RED = "\033[1;31m"
RESET = "\033[0m"


def log(msg: str):
    print(f"{PURPLE}{msg}{RESET}", file=sys.stderr)


def die(msg: str, code: int = 2):
    print(f"{RED}[ERROR]{RESET} {msg}", file=sys.stderr)
    sys.exit(code)


def ok(msg: str):
    print(f"{GREEN}[OK]{RESET} {msg}", file=sys.stderr)


def warn(msg: str):
    print(f"{CYAN}[WARN]{RESET} {msg}", file=sys.stderr)


def progress_bar(
    iterable,
    *,
    desc: str = "Processing",
    unit: str = "item",
    total: Optional[int] = None,
    colour: str = "cyan",
    bar_format: Optional[str] = None,
    leave: bool = True,
    **kwargs,
):
    """Return a ``tqdm`` progress bar with the CLI's fixed width and colour.

    Extra keyword arguments are forwarded to ``tqdm`` unchanged.
    """
    return tqdm(
        iterable,
        desc=desc,
        unit=unit,
        total=total,
        ncols=80,
        colour=colour,
        bar_format=bar_format,
        leave=leave,
        **kwargs,
    )


def _setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("pdelab").setLevel(level)


# Package errors that mean "bad input or unusable numerics"; main() turns them into die().
_USER_ERRORS = (
    ConfigError,
    ProfileError,
    GridError,
    SchemeError,
    SymbolError,
    DispersionError,
    CharacteristicError,
    ClassificationError,
    OracleError,
    SpectralError,
    DegenerateStationaryPointError,
    ZeroDiagonalError,
    DivergenceError,
)


# =========================== Run plumbing =====================================


def _run_config(args, command: str) -> RunConfig:
    flags = {key: getattr(args, key, None) for key in getattr(args, "param_keys", ())}
    return RunConfig.build(
        command,
        file=args.config,
        overrides=args.set or (),
        flags=flags,
        out_dir=args.out,
    )


def _progress(args):
    if getattr(args, "quiet", False):
        return None
    return functools.partial(progress_bar, leave=False)


def _emit(payload) -> None:
    print(atomic_io.dumps(payload))


def _finish(cfg: RunConfig, report: Report) -> int:
    ignored = cfg.unused()
    if ignored:
        warn(f"ignored parameters: {', '.join(ignored)}")
    report.write(cfg)
    n = len(report.gates)
    if report.passed:
        ok(f"{report.project}: {n} gate{'s' if n != 1 else ''} passed, output in {cfg.out_dir}")
        return 0
    _emit(report.failures())
    warn(f"{report.project}: {len(report.failures())} of {n} gates failed, see {cfg.out_dir / 'summary.json'}")
    return 1


def _pointwise(fn: Callable[[float, float], float]) -> Callable[[np.ndarray, float], np.ndarray]:
    return lambda x, t: np.array([fn(float(xi), t) for xi in np.atleast_1d(x)])


def _time_step(cfg: RunConfig, stable: Callable[[float], float], default_s: float) -> float:
    """``k`` either given directly or derived from the mesh ratio ``s``."""
    cfg.exclusive("s", "k")
    if cfg.has("k"):
        k = cfg.get_float("k", 0.0)
        if not k > 0:
            raise ConfigError("k", f"must be positive, got {k}")
        return k
    s = cfg.get_float("s", default_s)
    if not s > 0:
        raise ConfigError("s", f"must be positive, got {s}")
    return stable(s)


def _export_evolution(
    cfg: RunConfig,
    report: Report,
    evo: Evolution,
    exact: Optional[Callable] = None,
    initial: Optional[Callable] = None,
    extra: Optional[dict] = None,
) -> None:
    errors = None
    payload = {"config": cfg.as_dict()}
    payload.update(extra or {})
    if exact is not None:
        ref = exact if initial is None else (lambda x, t: initial(x) if t == 0 else exact(x, t))
        errors = evo.errors_against(ref)
        names = []
        for idx, (t, _) in enumerate(evo.snapshots):
            name = f"oracle_{idx:04d}.csv"
            sample(lambda x: ref(x, t), evo.grid).to_csv(cfg.out_dir / name)
            names.append(name)
        payload["oracle_files"] = names
        worst = max(e["max"] for e in errors)
        report.notes["max_error"] = worst
        if cfg.has("tol"):
            report.below(f"{cfg.command} max error vs oracle", worst, cfg.get_float("tol", 0.0))
    evo.export(cfg.out_dir, command=cfg.command, errors=errors, extra=payload)
    report.notes["scheme"] = evo.scheme
    report.notes["snapshots"] = len(evo.snapshots)
    if evo.blow_up is not None:
        report.notes["blow_up"] = {"step": evo.blow_up.step, "max": evo.blow_up.max_value}
        warn(f"{evo.scheme}: blow-up at step {evo.blow_up.step}")
    if cfg.has("expect_blow_up"):
        want = cfg.get_int("expect_blow_up", 1) != 0
        report.check(f"{cfg.command} blow-up", (evo.blow_up is not None) == want,
                     None if evo.blow_up is None else evo.blow_up.step,
                     "blow-up" if want else "no blow-up")
    for msg in evo.warnings:
        warn(msg)
    log(f"{evo.scheme}: {len(evo.snapshots)} snapshots written to {cfg.out_dir}")


# =========================== solve ============================================


def _solve_heat(cfg: RunConfig, report: Report) -> None:
    phi = cfg.get_profile("phi", "hat")
    c = cfg.get_float("c", 1.0)
    l = cfg.get_float("l", 1.0)
    grid = UniformGrid1D(0.0, l, cfg.get_int("N", 50, minimum=2))
    method = cfg.get_choice("method", "explicit", ("explicit", "implicit", "crank-nicolson", "qscheme", "spectral"))
    oracle = cfg.get_choice("oracle", "none", ("none", "heat-series", "image-series"))
    if method == "spectral":
        evo = _heat_spectral(cfg, phi, c, l, grid)
    else:
        k = _time_step(cfg, lambda s: s * grid.h ** 2 / (c * c), 0.49)
        steps = cfg.get_int("steps", 100, minimum=0)
        bc = cfg.get_choice("bc", "dirichlet", ("dirichlet", "neumann"))
        lo, hi = cfg.get_float("g_lo", 0.0), cfg.get_float("g_hi", 0.0)
        boundary = BoundarySpec.dirichlet(lo, hi) if bc == "dirichlet" else BoundarySpec.neumann(lo, hi)
        if (bc != "dirichlet" or lo or hi) and oracle != "none":
            raise ConfigError("oracle", f"{oracle} needs homogeneous Dirichlet ends")
        problem = HeatProblem(c * c, grid, TimeAxis(k, steps), phi, boundary, output_times=cfg.output_times)
        if bc == "neumann":
            if method != "explicit":
                raise ConfigError("method", "Neumann ends are stepped by the explicit scheme only")
            evo = heat_explicit_neumann(problem)
        elif method == "explicit":
            evo = heat_explicit(problem)
        elif method == "crank-nicolson":
            evo = crank_nicolson(problem)
        elif method == "implicit":
            evo = heat_qscheme(problem, 1.0)
        else:
            evo = heat_qscheme(problem, cfg.get_float("Q", 0.5))
    exact = None
    if oracle == "heat-series":
        series = heat_series(phi, c, l, K=cfg.get_int("K", config.SERIES_TERMS, minimum=1))
        exact = lambda x, t: series(x, t)
    elif oracle == "image-series":
        exact = _pointwise(image_series_heat(phi, c, l, J=cfg.get_int("J", 3, minimum=0)))
    _export_evolution(cfg, report, evo, exact, initial=phi)


def _heat_spectral(cfg: RunConfig, phi, c: float, l: float, grid: UniformGrid1D) -> Evolution:
    """Sine-mode solution sampled at the output times."""
    modes = ModeSet.sine(cfg.get_int("K", 50, minimum=1), l, c)
    N0 = forward(phi, modes).values
    t_end = cfg.get_float("t_end", 0.1)
    times = sorted(set((0.0, *cfg.output_times, t_end)))
    evo = Evolution("spectral", grid, {"K": modes.K, "t_end": t_end})
    for t in times:
        gf = sample(inverse(solve_parabolic_modes(modes, N0, t), modes), grid)
        evo.snapshots.append((t, gf))
        evo.max_norms.append(norm_linf(gf))
    return evo


def _solve_wave(cfg: RunConfig, report: Report) -> None:
    phi = cfg.get_profile("phi", "gaussian(1,5,10)")
    psi = cfg.get_profile("psi", None)
    c = cfg.get_float("c", 1.0)
    x_lo, x_hi = cfg.get_float("x_lo", 0.0), cfg.get_float("x_hi", 20.0)
    grid = UniformGrid1D(x_lo, x_hi, cfg.get_int("N", 200, minimum=2))
    k = _time_step(cfg, lambda s: grid.h * math.sqrt(s) / c, 0.9)
    steps = cfg.get_int("steps", 60, minimum=0)
    omega = cfg.get_float("drive_omega", 0.0)
    g_lo = (lambda t: math.sin(omega * t)) if omega else cfg.get_float("g_lo", 0.0)
    g_hi = cfg.get_float("g_hi", 0.0)
    problem = WaveProblem(c, grid, TimeAxis(k, steps), phi, psi, BoundarySpec.dirichlet(g_lo, g_hi),
                          output_times=cfg.output_times)
    evo = wave_leapfrog(problem)
    oracle = cfg.get_choice("oracle", "none", ("none", "dalembert", "wave-series", "signal"))
    exact = None
    if oracle == "dalembert":
        exact = _pointwise(lambda x, t: dalembert(phi, psi, c, x, t))
    elif oracle == "wave-series":
        if x_lo != 0 or omega or g_hi or cfg.get_float("g_lo", 0.0):
            raise ConfigError("oracle", "wave-series needs the interval (0, l) with homogeneous ends")
        series = wave_series(phi, psi, c, x_hi, K=cfg.get_int("K", config.SERIES_TERMS, minimum=1))
        exact = lambda x, t: series(x, t)
    elif oracle == "signal":
        if not omega:
            raise ConfigError("oracle", "signal needs drive_omega")
        incoming = halfline_wave(lambda t: np.sin(omega * np.asarray(t)), c)
        exact = _pointwise(lambda x, t: incoming(x - x_lo, t))
    report.notes["s"] = problem.s
    _export_evolution(cfg, report, evo, exact, initial=phi)


_ADVECTION_MODELS = ("transport", "burgers", "conserved-cubic")


def _solve_advection(cfg: RunConfig, report: Report) -> None:
    model = cfg.get_choice("model", "transport", _ADVECTION_MODELS)
    phi = cfg.get_profile("phi", "gaussian(1,1,-3)" if model == "transport" else "gaussian(1,1,0)")
    x_lo, x_hi = cfg.get_float("x_lo", -10.0), cfg.get_float("x_hi", 10.0)
    grid = UniformGrid1D(x_lo, x_hi, cfg.get_int("N", 400, minimum=2))
    t_end = cfg.get_float("t_end", 4.0 if model == "transport" else 1.0)
    nu = cfg.get_float("nu", 0.5)
    if not (t_end > 0 and nu > 0):
        raise ConfigError("t_end" if not t_end > 0 else "nu", "must be positive")
    if model == "transport":
        a0, b0 = cfg.get_float("a", 1.0), cfg.get_float("b", 1.0)
        if a0 == 0:
            raise ConfigError("a", "must be nonzero")
        vmax = abs(b0 / a0)
        make = lambda time: AdvectionProblem.constant(a0, b0, grid, time, phi, output_times=cfg.output_times)
        exact = lambda x, t: phi(x - (b0 / a0) * t)
    elif model == "burgers":
        vmax = float(np.max(np.abs(sample(phi, grid).values)))
        make = lambda time: AdvectionProblem(lambda x, t: np.ones_like(x), lambda x, t, u: u, grid, time, phi,
                                             output_times=cfg.output_times)
        t_star = shock_time(phi, phi.derivative, x_lo, x_hi).t_star
        report.notes["shock_time"] = t_star if math.isfinite(t_star) else "inf"
        exact = None
        if t_end < t_star:
            exact = _pointwise(lambda x, t: burgers_implicit(phi, x, t, dphi=phi.derivative, t_star=t_star))
    else:
        vmax = 2.0 * t_end
        make = lambda time: AdvectionProblem(lambda x, t: 3.0 * x * x + 1.0, lambda x, t, u: np.full_like(x, 2.0 * t),
                                             grid, time, phi, output_times=cfg.output_times)
        exact = _pointwise(lambda x, t: conserved_cubic_solution(phi, x, t))
    steps = max(1, int(math.ceil(t_end * max(vmax, 1e-12) / (nu * grid.h))))
    evo = advection_leapfrog(make(TimeAxis(t_end / steps, steps)))
    oracle = cfg.get_choice("oracle", "none", ("none", "characteristics"))
    if oracle == "none":
        exact = None
    elif exact is None:
        raise ConfigError("oracle", f"characteristics oracle only holds before the shock time {report.notes['shock_time']}")
    grads = [max_gradient(gf) for _, gf in evo.snapshots]
    atomic_io.write_table(cfg.out_dir / "max_gradient.csv", ["t", "max_abs_u_x"], [evo.times, grads])
    report.notes["model"] = model
    _export_evolution(cfg, report, evo, exact, extra={"max_gradient": "max_gradient.csv"})


HARMONIC: Dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "harmonic-x2y2": lambda x, y: x * x - y * y,
    "harmonic-xy": lambda x, y: x * y,
    "harmonic-linear": lambda x, y: 1.0 + 2.0 * x - y,
}


def _solve_laplace(cfg: RunConfig, report: Report) -> None:
    N = cfg.get_int("N", 16, minimum=2)
    name = cfg.get_choice("boundary", "harmonic-x2y2", tuple(HARMONIC))
    f = HARMONIC[name]
    method = cfg.get_choice("method", "gauss-seidel", ("jacobi", "gauss-seidel", "compare"))
    tol = cfg.get_float("residual_tol", 1e-8)
    max_iter = cfg.get_int("max_iter", 100_000, minimum=1)
    system = assemble_laplace_2d(N)
    b = system.rhs(f)
    exact = sample(f, system.grid)
    reports = {}
    for m in ("jacobi", "gauss-seidel") if method == "compare" else (method,):
        x, rep = solve_iterative(system.matrix, b, m, tol, max_iter)
        reports[m] = rep
        gf = system.embed(x, f)
        gf.to_csv(cfg.out_dir / f"solution_{m}.csv")
        history = rep.residual_history
        report.table(f"residuals_{m}.csv", ["iteration", "residual"], [np.arange(len(history)), history],
                     title=f"{m} residual", logy=True)
        report.check(f"{m} converged", rep.converged, rep.iterations, f"residual < {tol:g}")
        # quadratic and linear harmonics are discretely harmonic; |A^-1|_inf <= N^2/8
        report.below(f"{m} error vs {name}", norm_linf(gf - exact), 2.0 * tol * N * N / 8.0)
        report.notes[m] = {
            **rep.as_dict(),
            "predicted_rho": predicted_spectral_radius(m, N),
            "predicted_iterations": predicted_iteration_count(m, N),
        }
    if method == "compare":
        jac, gs = reports["jacobi"], reports["gauss-seidel"]
        ratio = gs.iterations / max(jac.iterations, 1)
        report.check("gauss-seidel / jacobi iterations", 0.4 <= ratio <= 0.6, ratio, "in [0.4, 0.6]")
        report.within("jacobi convergence factor", jac.estimated_rho, predicted_spectral_radius("jacobi", N), 0.1,
                      relative=True)
    if cfg.get_int("export_matrix", 0):
        system.matrix.export(cfg.out_dir / "laplace.mtx")


_SOLVERS = {
    "heat": _solve_heat,
    "wave": _solve_wave,
    "advection": _solve_advection,
    "laplace": _solve_laplace,
}


def cmd_solve(args) -> int:
    cfg = _run_config(args, f"solve {args.equation}")
    report = Report(cfg.command, cfg.out_dir)
    _SOLVERS[args.equation](cfg, report)
    return _finish(cfg, report)


# =========================== analyses =========================================


def _stability_pde(cfg: RunConfig, name: str) -> PDECoefficients:
    if name == "heat":
        return PDECoefficients.heat(cfg.get_float("c2", 1.0))
    if name == "klein-gordon":
        return PDECoefficients.klein_gordon(cfg.get_float("gamma", 1.0), cfg.get_float("c", 1.0))
    if name == "telegrapher":
        return PDECoefficients.telegrapher(cfg.get_float("gamma", 1.0), cfg.get_float("damping", 1.0))
    return PDECoefficients(*(cfg.get_float(key, 0.0) for key in "ABCDEF"))


def cmd_stability(args) -> int:
    cfg = _run_config(args, "stability")
    report = Report("stability", cfg.out_dir)
    cfg.exclusive("scheme", "pde")
    if cfg.has("pde"):
        name = cfg.get_choice("pde", "heat", ("heat", "klein-gordon", "telegrapher", "custom"))
        coeffs = _stability_pde(cfg, name)
        verdict = stability_index(coeffs, k_max=cfg.get_float("k_max", 1e4))
        payload = {"pde": name, **verdict.as_dict(), "mode_type": classify_mode_type(coeffs)}
        if payload["mode_type"] == "conservative":
            ks = cfg.get_floats("ks", (0.5, 1.0, 2.0))
            try:
                rel = dispersion(coeffs)
            except DispersionError as exc:
                payload["dispersion"] = str(exc)
            else:
                payload["dispersive"] = rel.dispersive
                payload["phase_speed"] = {f"{k:g}": rel.phase_speed(k) for k in ks}
                payload["group_velocity"] = {f"{k:g}": rel.group_velocity(k) for k in ks}
    else:
        name = cfg.get_choice("scheme", "heat-explicit", tuple(BUILTIN_SYMBOLS))
        symbol = BUILTIN_SYMBOLS[name]
        params = dict(symbol.defaults)
        for key in ("s", "nu", "Q"):
            if cfg.has(key):
                params[key] = cfg.get_float(key, 0.0)
        params.setdefault(symbol.stability_param, 0.5)
        verdict = scheme_stability(symbol, params)
        payload = {"scheme": name, "params": params, **verdict.as_dict()}
        bracket = cfg.get_floats("threshold", ())
        if bracket:
            if len(bracket) != 2:
                raise ConfigError("threshold", "expected lo,hi")
            payload["threshold"] = stability_threshold(symbol, bracket[0], bracket[1], params)
    if cfg.has("expect"):
        want = cfg.get_choice("expect", "stable", ("stable", "unstable"))
        report.check(f"{cfg.command} verdict", payload["stable"] == (want == "stable"), payload["classification"], want)
    report.notes.update(payload)
    _emit(payload)
    return _finish(cfg, report)


def _read_matrix(path: str) -> np.ndarray:
    try:
        return np.loadtxt(path, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError("matrix", f"cannot read {path}: {exc}") from None


def cmd_classify(args) -> int:
    cfg = _run_config(args, "classify")
    report = Report("classify", cfg.out_dir)
    cfg.exclusive("coeffs", "matrix")
    if cfg.has("matrix"):
        form = _read_matrix(cfg.get_str("matrix", ""))
        result = classify_ndim(form)
        payload = result.as_dict()
        payload["scales"] = result.scales.tolist()
    else:
        values = cfg.get_floats("coeffs", (1.0, 0.0, -1.0, 0.0, 0.0, 0.0))
        if len(values) != 6:
            raise ConfigError("coeffs", f"expected six numbers A,B,C,D,E,F, got {len(values)}")
        pde = SecondOrderPDE2(*values)
        payload = classify2(pde).as_dict()
        payload["characteristics"] = [fam.describe() for fam in characteristic_families_constant(pde)]
        form = cfg.get_choice("hyperbolic_form", "xi-eta", ("xi-eta", "alpha-beta"))
        payload["canonical"] = canonical_transform_constant(pde, form).as_dict()
    if cfg.has("expect"):
        want = cfg.get_choice("expect", "hyperbolic", ("hyperbolic", "parabolic", "elliptic"))
        report.check("classification", payload["kind"] == want, payload["kind"], want)
    report.notes.update(payload)
    _emit(payload)
    return _finish(cfg, report)


def _characteristic_problem(cfg: RunConfig):
    model = cfg.get_choice("model", "burgers", _ADVECTION_MODELS)
    phi = cfg.get_profile("phi", "tent")
    lo, hi = cfg.get_float("tau_lo", -2.0), cfg.get_float("tau_hi", 2.0)
    if model == "transport":
        return CharacteristicProblem.transport(cfg.get_float("speed", 1.0), phi, lo, hi)
    if model == "burgers":
        return CharacteristicProblem.burgers(phi, lo, hi)
    return conserved_cubic_problem(phi, lo, hi)


def _write_polylines(path: Path, lines: Sequence[np.ndarray]) -> Path:
    blocks = ["\n".join(f"{x:.17g},{t:.17g}" for x, t in curve) for curve in lines]
    return atomic_io.safe_write(path, "x,t\n" + "\n\n".join(blocks) + "\n")


def cmd_characteristics(args) -> int:
    cfg = _run_config(args, "characteristics")
    report = Report("characteristics", cfg.out_dir)
    problem = _characteristic_problem(cfg)
    n_tau = cfg.get_int("n_tau", 81, minimum=2)
    family = integrate_family(problem, n_tau, cfg.get_int("n_s", 200, minimum=2), cfg.get_float("s_max", 1.5))
    family.to_csv(cfg.out_dir / "family.csv")
    _write_polylines(cfg.out_dir / "characteristics.csv", family.polylines(max(1, n_tau // 40)))
    points = detect_characteristic_points(problem)
    breakdown = jacobian_shock_time(family)
    atomic_io.write_json(cfg.out_dir / "manifest.json", {
        "command": cfg.command,
        "problem": problem.name,
        "family": "family.csv",
        "polylines": "characteristics.csv",
    })
    payload = {
        "problem": problem.name,
        "truncated": family.truncated,
        "characteristic_points": points.taus,
        "fully_characteristic": points.fully_characteristic,
        "breakdown": breakdown.as_dict(),
    }
    if points.taus or points.fully_characteristic:
        warn("initial curve touches a base characteristic; the Cauchy problem is not well posed there")
    report.notes.update(payload)
    _emit(payload)
    return _finish(cfg, report)


def cmd_shock_time(args) -> int:
    cfg = _run_config(args, "shock-time")
    report = Report("shock-time", cfg.out_dir)
    phi = cfg.get_profile("phi", "tent")
    lo, hi = cfg.get_float("tau_lo", -2.0), cfg.get_float("tau_hi", 2.0)
    result = shock_time(phi, phi.derivative, lo, hi, cfg.get_int("n", 1000, minimum=100))
    payload = {"profile": phi.name, **result.as_dict()}
    if cfg.has("expected"):
        report.within(f"shock time {phi.name}", result.t_star, cfg.get_float("expected", 0.0),
                      cfg.get_float("tol", 1e-8))
    report.notes.update(payload)
    _emit(payload)
    return _finish(cfg, report)


# =========================== oracles ==========================================

_ORACLES = (
    "heat-series",
    "wave-series",
    "dalembert",
    "cauchy-heat",
    "halfline-heat",
    "erf",
    "image-heat",
    "halfline-wave",
    "laplace-rectangle",
    "laplace-halfplane",
    "sturm-liouville",
)


def _oracle_field(cfg: RunConfig, name: str):
    """``(u(x, t), x_lo, x_hi, label of the second variable)`` for an oracle name."""
    c = cfg.get_float("c", 1.0)
    l = cfg.get_float("l", 1.0)
    K = cfg.get_int("K", config.SERIES_TERMS, minimum=1)
    if name == "heat-series":
        s = heat_series(cfg.get_profile("phi", "hat"), c, l, K)
        return (lambda x, t: s(x, t)), 0.0, l, "t"
    if name == "wave-series":
        s = wave_series(cfg.get_profile("phi", "hat"), cfg.get_profile("psi", None), c, l, K)
        return (lambda x, t: s(x, t)), 0.0, l, "t"
    if name == "dalembert":
        phi, psi = cfg.get_profile("phi", "gaussian(1,5,0)"), cfg.get_profile("psi", None)
        return _pointwise(lambda x, t: dalembert(phi, psi, c, x, t)), -5.0, 5.0, "t"
    if name == "cauchy-heat":
        return _pointwise(cauchy_heat(cfg.get_profile("phi", "tent"), c)), -5.0, 5.0, "t"
    if name == "halfline-heat":
        f, g = cfg.get_profile("phi", "none"), cfg.get_profile("g", "const(1)")
        return _pointwise(halfline_heat(f, g, c)), 0.0, 4.0, "t"
    if name == "erf":
        return erf_solution(cfg.get_float("u0", 1.0), c), 0.0, 4.0, "t"
    if name == "image-heat":
        return _pointwise(image_series_heat(cfg.get_profile("phi", "hat"), c, l, cfg.get_int("J", 3, minimum=0))), 0.0, l, "t"
    if name == "halfline-wave":
        return _pointwise(halfline_wave(cfg.get_profile("g", "sin(2,1)"), c)), 0.0, 4.0, "t"
    if name == "laplace-rectangle":
        l_hat = cfg.get_float("l_hat", 1.0)
        s = laplace_rectangle_series(cfg.get_profile("phi", "hat"), cfg.get_profile("g", None), l, l_hat, K)
        return (lambda x, y: s(x, y)), 0.0, l, "y"
    return _pointwise(laplace_halfplane(cfg.get_profile("phi", "heaviside"))), -5.0, 5.0, "y"


def _sturm_liouville(cfg: RunConfig, report: Report) -> None:
    l = cfg.get_float("l", 1.0)
    count = cfg.get_int("count", 5, minimum=1)
    top = (math.pi * (count + 0.5) / l) ** 2
    pairs = sl_shoot(SturmLiouville.dirichlet(l), cfg.get_float("lam_lo", 1.0), cfg.get_float("lam_hi", top))
    lams = [p.lam for p in pairs]
    exact = [(math.pi * k / l) ** 2 for k in range(1, len(pairs) + 1)]
    report.table("eigenvalues.csv", ["k", "lambda", "exact"], [np.arange(1, len(lams) + 1), lams, exact])
    report.check("eigenvalue count", len(pairs) == count, len(pairs), f"== {count}")
    for k, (got, want) in enumerate(zip(lams, exact), start=1):
        report.within(f"lambda_{k}", got, want, 1e-6, relative=True)


def cmd_oracle(args) -> int:
    cfg = _run_config(args, f"oracle {args.name}")
    report = Report(cfg.command, cfg.out_dir)
    if args.name == "sturm-liouville":
        _sturm_liouville(cfg, report)
        return _finish(cfg, report)
    fn, x_lo, x_hi, var = _oracle_field(cfg, args.name)
    xs = np.linspace(cfg.get_float("x_lo", x_lo), cfg.get_float("x_hi", x_hi), cfg.get_int("N", 200, minimum=1) + 1)
    levels = cfg.output_times or ((0.01, 0.1) if var == "t" else (0.25, 0.5))
    columns = [xs] + [np.asarray(fn(xs, v), dtype=float) for v in levels]
    header = ["x"] + [f"u({var}={v:g})" for v in levels]
    report.table("oracle.csv", header, columns, title=args.name)
    report.notes["levels"] = list(levels)
    log(f"{args.name}: {len(levels)} profiles on {xs.size} points")
    return _finish(cfg, report)


# =========================== spectral ========================================


def cmd_nonlinear_heat(args) -> int:
    """``u_t = u_xx + λ̂ u (1 − u²)`` on (0, π); with ``form=w`` the run is in ``w = u/ε``."""
    cfg = _run_config(args, "nonlinear-heat")
    report = Report("nonlinear-heat", cfg.out_dir)
    lam_hat = cfg.get_float("lambda_hat", 2.0)
    form = cfg.get_choice("form", "u", ("u", "w"))
    eps = cfg.get_float("eps", 1.0) if form == "w" else 1.0
    K = cfg.get_int("K", 5, minimum=1)
    t_end = cfg.get_float("t_end", 30.0)
    amp = cfg.get_float("amplitude", 0.1)
    profile = cfg.get_profile("h", "sin(1,3.141592653589793)")
    traj = nonlinear_heat_galerkin(lam_hat, eps, lambda x: amp * profile(x), K, t_end)
    traj.as_coefficients().to_csv(cfg.out_dir / "trajectory.csv")
    limit = stationary_limit(lam_hat, eps, float(np.sign(traj.final[0]) or 1.0))
    report.notes.update({
        "form": form,
        "eps": eps,
        "final": traj.final.tolist(),
        "single_mode_limit": limit,
        "blow_up": traj.blow_up,
    })
    if form == "w":
        report.notes["final_u"] = (eps * traj.final).tolist()
    report.check("bounded trajectory", traj.blow_up is None, traj.blow_up, "no blow-up")
    if cfg.has("tol") and lam_hat != 1.0:
        report.within("N1 vs single-mode limit", float(traj.final[0]), limit, cfg.get_float("tol", 0.05),
                      relative=limit != 0.0)
    return _finish(cfg, report)


def cmd_resonance(args) -> int:
    cfg = _run_config(args, "resonance")
    report = Report("resonance", cfg.out_dir)
    lam = cfg.get_float("lam", 4.0)
    omegas = np.asarray(cfg.get_floats("omegas", np.linspace(0.5, 4.0, 36)), dtype=float)
    t_end = cfg.get_float("t_end", 20.0)
    peaks = resonance_sweep(lam, omegas, t_end)
    report.table("resonance.csv", ["omega", "max_abs_N"], [omegas, peaks], title="forced mode response", logy=True)
    peak = float(omegas[int(np.argmax(peaks))])
    report.notes.update({"peak_omega": peak, "natural_frequency": math.sqrt(lam)})
    step = float(np.min(np.diff(np.sort(omegas)))) if omegas.size > 1 else math.inf
    if math.sqrt(lam) <= float(np.max(omegas)) and math.sqrt(lam) >= float(np.min(omegas)):
        report.check("response peaks at the natural frequency", abs(peak - math.sqrt(lam)) <= step, peak,
                     f"within {step:g} of {math.sqrt(lam):g}")
    return _finish(cfg, report)


def cmd_kg_farfield(args) -> int:
    cfg = _run_config(args, "kg-farfield")
    report = Report("kg-farfield", cfg.out_dir)
    gamma, c = cfg.get_float("gamma", 1.0), cfg.get_float("c", 1.0)
    t = cfg.get_float("t", 50.0)
    spectrum = cfg.get_profile("F_plus", "gaussian(1,1,0.5)")
    branch = cfg.get_choice("branch", "plus", ("plus", "minus", "both"))
    minus = spectrum if branch != "plus" else None
    span = cfg.get_float("x_span", 1.2 * gamma * t)
    xs = np.linspace(-span, span, cfg.get_int("N", 400, minimum=1) + 1)
    values = np.array([kg_farfield(spectrum, gamma, c, float(x), t, F_minus=minus, branch=branch).value for x in xs])
    report.table("farfield.csv", ["x", "re", "im", "abs"], [xs, values.real, values.imag, np.abs(values)],
                 title=f"Klein-Gordon far field at t={t:g}")
    if cfg.get_int("compare", 0) and branch == "plus":
        lo, hi = cfg.get_float("lam_lo", -8.0), cfg.get_float("lam_hi", 8.0)
        exact = np.array([kg_mode_superposition(spectrum, gamma, c, float(x), t, lo, hi) for x in xs])
        report.table("superposition.csv", ["x", "re", "im", "abs"], [xs, exact.real, exact.imag, np.abs(exact)])
        peak = float(np.max(np.abs(exact)))
        report.below("far field vs mode superposition", float(np.max(np.abs(values - exact))) / peak,
                     cfg.get_float("tol", 0.05))
    return _finish(cfg, report)


# =========================== projects / plot ==================================


def cmd_project(args) -> int:
    cfg = _run_config(args, args.project)
    log(f"running {args.project} into {cfg.out_dir}")
    report = PROJECTS[args.project](cfg, _progress(args))
    return _finish(cfg, report)


def cmd_plot(args) -> int:
    try:
        target = write_plot_script(args.manifest, args.output)
    except ValueError as e:
        # json.JSONDecodeError is a ValueError too
        die(f"plot: {args.manifest}: {e}")
    ok(f"plot script written to {target}")
    return 0


# =========================== CLI ==============================================


def _params(sp: argparse.ArgumentParser, *keys: str) -> None:
    """Dedicated ``--key`` flags; values stay strings and are typed by RunConfig."""
    for key in keys:
        sp.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None, metavar="VALUE")
    sp.set_defaults(param_keys=keys)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value run configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one run parameter")
    common.add_argument("--out", type=Path, help="output directory (default pdelab-out/<command>)")
    common.add_argument("--quiet", action="store_true", help="no progress bars")

    p = argparse.ArgumentParser(prog="pdelab", description="PDE numerics lab: schemes, stability, characteristics, oracles")
    p.add_argument("--verbose", action="store_true", help="debug logging")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd")

    sp = sub.add_parser("solve", parents=[common], help="Run a finite-difference or iterative solver")
    sp.add_argument("equation", choices=sorted(_SOLVERS))
    _params(sp, "times", "s", "k", "N", "steps", "phi", "psi", "oracle", "method", "boundary", "model", "tol",
            "t_end", "nu")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("stability", parents=[common], help="Von Neumann verdict for a scheme or a PDE")
    _params(sp, "times", "scheme", "pde", "s", "nu", "Q", "threshold", "expect")
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("classify", parents=[common], help="Type and canonical form of a second-order PDE")
    _params(sp, "times", "coeffs", "matrix", "hyperbolic_form", "expect")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("characteristics", parents=[common], help="Integrate a family of characteristics")
    _params(sp, "times", "model", "phi", "tau_lo", "tau_hi", "n_tau", "n_s", "s_max")
    sp.set_defaults(func=cmd_characteristics)

    sp = sub.add_parser("shock-time", parents=[common], help="Burgers breakdown time for a profile")
    _params(sp, "times", "phi", "tau_lo", "tau_hi", "expected")
    sp.set_defaults(func=cmd_shock_time)

    sp = sub.add_parser("oracle", parents=[common], help="Evaluate an analytic solution on a grid")
    sp.add_argument("name", choices=_ORACLES)
    _params(sp, "times", "phi", "psi", "g", "c", "l", "K", "N")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("nonlinear-heat", parents=[common], help="Galerkin run of the nonlinear source problem")
    _params(sp, "times", "lambda_hat", "eps", "form", "K", "t_end", "amplitude", "h")
    sp.set_defaults(func=cmd_nonlinear_heat)

    sp = sub.add_parser("resonance", parents=[common], help="Forced-mode response over driving frequencies")
    _params(sp, "times", "lam", "omegas", "t_end")
    sp.set_defaults(func=cmd_resonance)

    sp = sub.add_parser("kg-farfield", parents=[common], help="Klein-Gordon stationary-phase far field")
    _params(sp, "times", "gamma", "c", "t", "F_plus", "branch", "N", "compare")
    sp.set_defaults(func=cmd_kg_farfield)

    for name in sorted(PROJECTS):
        sp = sub.add_parser(name, parents=[common], help=f"Run the {name} harness")
        _params(sp, "times")
        sp.set_defaults(func=cmd_project, project=name)

    sp = sub.add_parser("plot", help="Write a gnuplot script for a run manifest")
    sp.add_argument("manifest", type=Path)
    sp.add_argument("--output", type=Path, default=None)
    sp.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "cmd", None) is None:
        parser.error("a subcommand is required")
    _setup_logging(args.verbose)
    try:
        return int(args.func(args) or 0)
    except _USER_ERRORS as e:
        die(f"{args.cmd}: {e}")
    except OSError as e:
        die(f"{args.cmd}: {e}")
    except KeyboardInterrupt:
        die("interrupted", 130)


if __name__ == "__main__":
    sys.exit(main())
