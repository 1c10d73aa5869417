"""Shared numerical kernels: quadrature, fixed-step RK4, root scanning, bounded minimisation."""

from __future__ import annotations

import logging
import math
import warnings
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize

from . import config

logger = logging.getLogger(__name__)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    points: Optional[Sequence[float]] = None,
    weight: Optional[str] = None,
    wvar: Optional[float] = None,
    tol: Optional[float] = None,
) -> float:
    """Adaptive quadrature of a real integrand to the configured absolute tolerance.

    ``points`` are interior breakpoints (kinks, peaks); with a trigonometric
    ``weight`` they split the range so each piece is integrated with the weight.
    """
    if a == b:
        return 0.0
    eps = config.QUAD_TOL if tol is None else tol
    inner: List[float] = []
    if points is not None and math.isfinite(a) and math.isfinite(b):
        lo, hi = min(a, b), max(a, b)
        inner = sorted({float(p) for p in points if lo < p < hi})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        if weight is not None:
            edges = [a, *inner, b] if a < b else [a, *reversed(inner), b]
            total = 0.0
            for lo, hi in zip(edges[:-1], edges[1:]):
                val, err = _integrate.quad(
                    f, lo, hi, weight=weight, wvar=wvar,
                    epsabs=eps, epsrel=1e-13, limit=config.QUAD_LIMIT,
                )
                total += val
            return float(total)
        val, err = _integrate.quad(
            f, a, b, points=inner or None,
            epsabs=eps, epsrel=1e-13, limit=config.QUAD_LIMIT,
        )
    if err > 100 * eps:
        logger.debug("quadrature on [%g, %g] error estimate %.3g", a, b, err)
    return float(val)


def integrate_complex(f: Callable[[float], complex], a: float, b: float, **kwargs) -> complex:
    re = integrate(lambda x: float(np.real(f(x))), a, b, **kwargs)
    im = integrate(lambda x: float(np.imag(f(x))), a, b, **kwargs)
    return complex(re, im)


def rk4(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t0: float,
    t1: float,
    n_steps: int,
    *,
    keep: bool = True,
) -> np.ndarray:
    """Classic fourth-order Runge-Kutta with a fixed step.

    The state may be any array shape; with ``keep`` the full trajectory of
    shape ``(n_steps + 1,) + y0.shape`` is returned, else only the final state.
    Integration stops early (remaining rows NaN) once the state is non-finite.
    """
    y = np.array(y0, dtype=float)
    h = (t1 - t0) / n_steps
    traj = np.full((n_steps + 1,) + y.shape, np.nan) if keep else None
    if keep:
        traj[0] = y
    t = t0
    for n in range(n_steps):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + (n + 1) * h
        if keep:
            traj[n + 1] = y
        if not np.all(np.isfinite(y)):
            break
    return traj if keep else y


def scan_roots(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    n_scan: int,
    *,
    xtol: float = 1e-10,
    samples: Optional[np.ndarray] = None,
) -> List[float]:
    """Sign-change scan on a uniform grid followed by bracketed refinement.

    Exact zeros at grid points are returned as-is. ``samples`` may hold
    precomputed values of ``g`` on the scan grid.
    """
    xs = np.linspace(lo, hi, n_scan + 1)
    vals = np.asarray(samples, dtype=float) if samples is not None else np.array([g(x) for x in xs])
    roots: List[float] = []
    for i in range(n_scan + 1):
        if vals[i] == 0.0:
            roots.append(float(xs[i]))
    for i in range(n_scan):
        a, b = vals[i], vals[i + 1]
        if a == 0.0 or b == 0.0 or not (np.isfinite(a) and np.isfinite(b)):
            continue
        if (a < 0) != (b < 0):
            roots.append(float(_optimize.brentq(g, xs[i], xs[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps)))
    return sorted(roots)


def minimize_bounded(g: Callable[[float], float], lo: float, hi: float, *, xtol: float = 1e-10) -> float:
    """Brent/golden-section minimiser restricted to ``[lo, hi]``."""
    res = _optimize.minimize_scalar(g, bounds=(lo, hi), method="bounded", options={"xatol": xtol, "maxiter": 500})
    return float(res.x)


__all__ = ["integrate", "integrate_complex", "rk4", "scan_roots", "minimize_bounded"]
