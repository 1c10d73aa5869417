"""Uniform grids, grid functions, norms and weighted inner products."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from . import atomic_io

logger = logging.getLogger(__name__)

Weight = Optional[Callable[..., np.ndarray]]


class GridError(ValueError):
    """Invalid grid definition or non-finite sampled data."""

    def __init__(self, message: str, *, index: int | None = None, coordinate: tuple | None = None):
        super().__init__(message)
        self.index = index
        self.coordinate = coordinate


class GridMismatchError(GridError):
    """Operands live on different grids."""


@dataclass(frozen=True)
class UniformGrid1D:
    x_lo: float
    x_hi: float
    n_cells: int

    def __post_init__(self):
        if not (math.isfinite(self.x_lo) and math.isfinite(self.x_hi)) or not self.x_hi > self.x_lo:
            raise GridError(f"need x_hi > x_lo, got [{self.x_lo}, {self.x_hi}]")
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise GridError(f"n_cells must be a positive integer, got {self.n_cells}")

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    def node(self, i: int) -> float:
        if not 0 <= i <= self.n_cells:
            raise IndexError(i)
        return self.x_hi if i == self.n_cells else self.x_lo + i * self.h

    @property
    def nodes(self) -> np.ndarray:
        xs = self.x_lo + np.arange(self.n_nodes) * self.h
        xs[-1] = self.x_hi
        xs.flags.writeable = False
        return xs

    def weights(self) -> np.ndarray:
        """Trapezoid weights."""
        w = np.full(self.n_nodes, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w


@dataclass(frozen=True)
class TimeAxis:
    dt: float
    n_steps: int
    t0: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise GridError(f"time step must be positive, got {self.dt}")
        if self.n_steps < 0:
            raise GridError(f"n_steps must be nonnegative, got {self.n_steps}")

    def t(self, n: int) -> float:
        return self.t0 + n * self.dt

    @property
    def t_end(self) -> float:
        return self.t(self.n_steps)

    def step_of(self, t: float) -> int:
        """Nearest step index for an output time."""
        n = int(round((t - self.t0) / self.dt))
        return min(max(n, 0), self.n_steps)


@dataclass(frozen=True)
class UniformGrid2D:
    x: UniformGrid1D
    y: UniformGrid1D

    @property
    def n_nodes(self) -> int:
        return self.x.n_nodes * self.y.n_nodes

    def index(self, i: int, j: int) -> int:
        return j * self.x.n_nodes + i

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x.nodes, self.y.nodes, indexing="xy")

    def weights(self) -> np.ndarray:
        return np.outer(self.y.weights(), self.x.weights()).ravel()

    @classmethod
    def unit_square(cls, n: int) -> "UniformGrid2D":
        axis = UniformGrid1D(0.0, 1.0, n)
        return cls(axis, axis)


Grid = Union[UniformGrid1D, UniformGrid2D]


@dataclass(frozen=True)
class GridFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size != self.grid.n_nodes:
            raise GridError(f"expected {self.grid.n_nodes} values, got {vals.size}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _check_same(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_same(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "GridFunction":
        return GridFunction(self.grid, scalar * self.values)

    __rmul__ = __mul__

    def to_csv(self, path: Union[str, Path]) -> Path:
        if isinstance(self.grid, UniformGrid1D):
            return atomic_io.write_table(path, ["x", "u"], [self.grid.nodes, self.values])
        X, Y = self.grid.mesh()
        return atomic_io.write_table(path, ["x", "y", "u"], [X.ravel(), Y.ravel(), self.values])

    @classmethod
    def from_csv(cls, path: Union[str, Path], grid: Grid) -> "GridFunction":
        header, data = atomic_io.read_table(path)
        return cls(grid, data[:, -1])


def _check_same(u: GridFunction, v: GridFunction) -> None:
    if u.grid != v.grid:
        raise GridMismatchError(f"grid mismatch: {u.grid} vs {v.grid}")


def sample(f: Callable[..., np.ndarray], grid: Grid) -> GridFunction:
    """Evaluate *f* at every node (vectorised call, ``f(x)`` or ``f(x, y)``)."""
    if isinstance(grid, UniformGrid1D):
        coords = (grid.nodes,)
    else:
        X, Y = grid.mesh()
        coords = (X.ravel(), Y.ravel())
    with np.errstate(all="ignore"):
        vals = np.broadcast_to(np.asarray(f(*coords), dtype=float), coords[0].shape).copy()
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        idx = int(bad[0])
        where = tuple(float(c[idx]) for c in coords)
        raise GridError(f"non-finite value at node {idx} {where}", index=idx, coordinate=where)
    return GridFunction(grid, vals)


def _weight_values(grid: Grid, rho: Weight) -> np.ndarray:
    if rho is None:
        return np.ones(grid.n_nodes)
    w = sample(rho, grid).values
    if np.any(w <= 0):
        idx = int(np.flatnonzero(w <= 0)[0])
        raise GridError(f"weight must be positive, rho={w[idx]} at node {idx}", index=idx)
    return w


def inner_product(u: GridFunction, v: GridFunction, rho: Weight = None) -> float:
    """Trapezoid approximation of the integral of rho*u*v."""
    _check_same(u, v)
    w = u.grid.weights() * _weight_values(u.grid, rho)
    return float(np.dot(w, u.values * v.values))


def norm_l2(u: GridFunction, rho: Weight = None) -> float:
    return math.sqrt(max(inner_product(u, u, rho), 0.0))


def norm_linf(u: GridFunction) -> float:
    return float(np.max(np.abs(u.values)))


__all__ = [
    "GridError",
    "GridMismatchError",
    "UniformGrid1D",
    "UniformGrid2D",
    "TimeAxis",
    "GridFunction",
    "sample",
    "inner_product",
    "norm_l2",
    "norm_linf",
]
