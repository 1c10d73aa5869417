"""Sparse 2D Laplacian, Jacobi / Gauss-Seidel iteration and the closed-form spectra.

The interior unknown ``(i, j)`` (``1 <= i, j <= N-1``) sits at row
``(j-1)(N-1) + (i-1)``, i.e. lexicographic with ``i`` running fastest, the
same ordering the grid module uses for 2D values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Literal, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import atomic_io
from .grid import GridFunction, UniformGrid2D

logger = logging.getLogger(__name__)

Method = Literal["jacobi", "gauss-seidel"]
DIVERGENCE_FACTOR = 1e6


class ZeroDiagonalError(ValueError):
    def __init__(self, row: int):
        super().__init__(f"zero diagonal entry in row {row}")
        self.row = row


class DivergenceError(RuntimeError):
    def __init__(self, report: "IterationReport"):
        super().__init__(
            f"iteration diverged after {report.iterations} sweeps "
            f"(residual {report.residual_history[-1]:.3g})"
        )
        self.report = report


@dataclass(frozen=True)
class SparseMatrix:
    """Compressed-row matrix with sorted column indices and no stored zeros."""

    csr: sp.csr_matrix = field(repr=False)

    def __post_init__(self):
        m = sp.csr_matrix(self.csr, dtype=float, copy=True)
        m.eliminate_zeros()
        m.sort_indices()
        object.__setattr__(self, "csr", m)

    @property
    def n_rows(self) -> int:
        return self.csr.shape[0]

    @property
    def n_cols(self) -> int:
        return self.csr.shape[1]

    @property
    def row_offsets(self) -> np.ndarray:
        return self.csr.indptr

    @property
    def col_indices(self) -> np.ndarray:
        return self.csr.indices

    @property
    def data(self) -> np.ndarray:
        return self.csr.data

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.csr @ x

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.csr.T.tocsr())

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray()

    def ldu(self) -> "DecompositionLDU":
        return DecompositionLDU(
            lower=sp.tril(self.csr, k=-1, format="csr"),
            diag=self.csr.diagonal(),
            upper=sp.triu(self.csr, k=1, format="csr"),
        )

    def export(self, path: Union[str, Path]) -> Path:
        """Matrix Market coordinate file (1-based indices)."""
        return atomic_io.write_matrix_market(path, self.csr.tocoo(), comment="pdelab sparse matrix")


@dataclass(frozen=True)
class DecompositionLDU:
    lower: sp.csr_matrix
    diag: np.ndarray
    upper: sp.csr_matrix

    def check_diagonal(self) -> None:
        zero = np.flatnonzero(self.diag == 0)
        if zero.size:
            raise ZeroDiagonalError(int(zero[0]))


@dataclass
class IterationReport:
    method: str
    iterations: int = 0
    residual_history: List[float] = field(default_factory=list)
    converged: bool = False

    @property
    def estimated_rho(self) -> float:
        """Geometric mean of the last 10 successive residual ratios."""
        r = [v for v in self.residual_history if v > 0]
        if len(r) < 2:
            return 0.0
        window = min(10, len(r) - 1)
        return float((r[-1] / r[-1 - window]) ** (1.0 / window))

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
            "estimated_rho": self.estimated_rho,
            "final_residual": self.residual_history[-1] if self.residual_history else None,
        }


@dataclass(frozen=True)
class LaplaceSystem:
    matrix: SparseMatrix
    N: int

    @property
    def grid(self) -> UniformGrid2D:
        return UniformGrid2D.unit_square(self.N)

    def rhs(self, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
        """Right-hand side collecting boundary values of *f* on the unit square."""
        N = self.N
        n = N - 1
        s = np.arange(N + 1) / N
        b = np.zeros((n, n))  # b[j-1, i-1]
        inner = s[1:N]
        b[:, 0] -= f(np.zeros(n), inner)
        b[:, -1] -= f(np.ones(n), inner)
        b[0, :] -= f(inner, np.zeros(n))
        b[-1, :] -= f(inner, np.ones(n))
        return b.ravel()

    def embed(self, interior: np.ndarray, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> GridFunction:
        """Full-grid function: boundary from *f*, interior from the solution vector."""
        grid = self.grid
        X, Y = grid.mesh()
        full = np.broadcast_to(np.asarray(f(X, Y), dtype=float), X.shape).copy()
        full[1:-1, 1:-1] = np.asarray(interior).reshape(self.N - 1, self.N - 1)
        return GridFunction(grid, full)


def assemble_laplace_2d(N: int) -> LaplaceSystem:
    """Five-point Laplacian (diagonal -4, neighbours 1) on the interior of the unit square."""
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    n = N - 1
    T = sp.diags([np.ones(n - 1), -4.0 * np.ones(n), np.ones(n - 1)], [-1, 0, 1], shape=(n, n))
    S = sp.diags([np.ones(n - 1), np.ones(n - 1)], [-1, 1], shape=(n, n))
    I = sp.identity(n)
    A = sp.kron(I, T) + sp.kron(S, I)
    return LaplaceSystem(SparseMatrix(A.tocsr()), N)


def tridiag_eigenvalues(a: float, b: float, n: int) -> List[float]:
    """Eigenvalues a + 2b cos(pi k/(n+1)), listed in k order."""
    if n < 1:
        raise ValueError("n must be positive")
    k = np.arange(1, n + 1)
    return list(a + 2.0 * b * np.cos(np.pi * k / (n + 1)))


def laplace_spectrum(N: int) -> List[float]:
    k = np.arange(1, N)
    sk = np.sin(np.pi * k / (2 * N)) ** 2
    return list((-4.0 * (sk[:, None] + sk[None, :])).ravel())


def jacobi_sweep(A: SparseMatrix, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    parts = A.ldu()
    parts.check_diagonal()
    return (b - parts.lower @ x - parts.upper @ x) / parts.diag


class _GaussSeidel:
    """Ascending in-place sweep expressed as a solve with the factor L + D."""

    def __init__(self, A: SparseMatrix):
        parts = A.ldu()
        parts.check_diagonal()
        self.upper = parts.upper
        lower = (parts.lower + sp.diags(parts.diag)).tocsc()
        self._lu = splu(lower, permc_spec="NATURAL", diag_pivot_thresh=0.0,
                        options={"SymmetricMode": True})

    def __call__(self, b: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self._lu.solve(b - self.upper @ x)


def gauss_seidel_sweep(A: SparseMatrix, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    return _GaussSeidel(A)(b, x)


def solve_iterative(
    A: SparseMatrix,
    b: np.ndarray,
    method: Method = "jacobi",
    tol: float = 1e-8,
    max_iter: int = 100_000,
    x0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, IterationReport]:
    """Iterate until the infinity-norm residual drops below *tol*."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    b = np.asarray(b, dtype=float)
    x = np.zeros(A.n_cols) if x0 is None else np.array(x0, dtype=float)
    if method == "jacobi":
        parts = A.ldu()
        parts.check_diagonal()
        off = parts.lower + parts.upper
        step = lambda bb, xx: (bb - off @ xx) / parts.diag
    elif method == "gauss-seidel":
        step = _GaussSeidel(A)
    else:
        raise ValueError(f"unknown method {method!r}")

    report = IterationReport(method=method)
    res = float(np.max(np.abs(b - A.matvec(x)))) if b.size else 0.0
    report.residual_history.append(res)
    initial = res
    while res >= tol and report.iterations < max_iter:
        x = step(b, x)
        report.iterations += 1
        res = float(np.max(np.abs(b - A.matvec(x))))
        report.residual_history.append(res)
        if not math.isfinite(res) or res > DIVERGENCE_FACTOR * max(initial, tol):
            raise DivergenceError(report)
    report.converged = res < tol
    logger.info("%s: %d sweeps, residual %.3g, rho~%.5f", method, report.iterations, res, report.estimated_rho)
    return x, report


def _known_method(method: str) -> str:
    if method not in ("jacobi", "gauss-seidel"):
        raise ValueError(f"unknown method {method!r}")
    return method


def predicted_spectral_radius(method: Method, N: int) -> float:
    _known_method(method)
    mu = 1.0 - 2.0 * math.sin(math.pi / (2 * N)) ** 2
    return mu if method == "jacobi" else mu * mu


def predicted_iteration_count(method: Method, N: int) -> float:
    _known_method(method)
    l_jacobi = (4.0 / math.pi ** 2) * N * N * math.log(N)
    return l_jacobi if method == "jacobi" else 0.5 * l_jacobi


__all__ = [
    "ZeroDiagonalError",
    "DivergenceError",
    "SparseMatrix",
    "DecompositionLDU",
    "IterationReport",
    "LaplaceSystem",
    "assemble_laplace_2d",
    "tridiag_eigenvalues",
    "laplace_spectrum",
    "jacobi_sweep",
    "gauss_seidel_sweep",
    "solve_iterative",
    "predicted_spectral_radius",
    "predicted_iteration_count",
]
