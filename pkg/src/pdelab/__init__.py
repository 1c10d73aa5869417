"""PDE numerics lab: finite-difference schemes with stability analysis, iterative
elliptic solvers, characteristics, classification, spectral solvers, analytic
oracles and stationary-phase asymptotics."""

from __future__ import annotations

from importlib import import_module
from typing import Any

from .grid import GridFunction, TimeAxis, UniformGrid1D, UniformGrid2D, inner_product, norm_l2, norm_linf, sample
from .profiles import parse_profile

__all__ = [
    "main",
    "UniformGrid1D",
    "UniformGrid2D",
    "TimeAxis",
    "GridFunction",
    "sample",
    "inner_product",
    "norm_l2",
    "norm_linf",
    "parse_profile",
    "atomic_io",
    "characteristics",
    "classify",
    "config",
    "fd_schemes",
    "linalg_iter",
    "numerics",
    "oracles",
    "plotting",
    "projects",
    "spectral",
    "stationary_phase",
    "vonneumann",
]

_SUBMODULES = {
    "atomic_io",
    "characteristics",
    "classify",
    "config",
    "fd_schemes",
    "linalg_iter",
    "numerics",
    "oracles",
    "plotting",
    "projects",
    "spectral",
    "stationary_phase",
    "vonneumann",
}


def _load_app():
    return import_module(f"{__name__}.app")


def main(argv=None):
    return _load_app().main(argv)


def __getattr__(name: str) -> Any:
    if name in _SUBMODULES:
        return import_module(f"{__name__}.{name}")
    if name in {"__title__", "__version__"}:
        return getattr(_load_app(), name)
    raise AttributeError(name)
