"""Convenience exports for pdelab library components."""

from importlib import import_module
from typing import Any

from .pdelab.grid import GridFunction, TimeAxis, UniformGrid1D, UniformGrid2D, sample
from .pdelab.profiles import parse_profile

__all__ = [
    "UniformGrid1D",
    "UniformGrid2D",
    "TimeAxis",
    "GridFunction",
    "sample",
    "parse_profile",
    "main",
]


def _load_app():
    return import_module(f"{__name__}.pdelab.app")


def main(argv=None):
    """Proxy to :func:`pdelab.app.main` without importing the solver stack."""

    return _load_app().main(argv)


def __getattr__(name: str) -> Any:
    if name == "__version__":
        return getattr(_load_app(), name)
    raise AttributeError(name)
