import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.linalg_iter import assemble_laplace_2d, predicted_iteration_count, solve_iterative


def _iterations(N, method):
    system = assemble_laplace_2d(N)
    b = system.rhs(lambda x, y: x * y)
    _, report = solve_iterative(system.matrix, b, method, tol=1e-8, max_iter=200_000)
    assert report.converged
    return report.iterations


@pytest.mark.benchmark
@pytest.mark.parametrize("N", [8, 16, 32])
def test_gauss_seidel_halves_jacobi_sweeps(N):
    jac = _iterations(N, "jacobi")
    gs = _iterations(N, "gauss-seidel")
    assert 0.4 <= gs / jac <= 0.6


@pytest.mark.benchmark
def test_sweeps_grow_quadratically_with_refinement():
    coarse = _iterations(16, "jacobi")
    fine = _iterations(32, "jacobi")
    assert 3.0 <= fine / coarse <= 5.0
    assert predicted_iteration_count("jacobi", 32) / predicted_iteration_count("jacobi", 16) == pytest.approx(5.0, rel=1e-9)
