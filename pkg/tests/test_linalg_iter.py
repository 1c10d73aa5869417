import os
import sys

import numpy as np
import hypothesis.strategies as st
import pytest
import scipy.sparse as sp
from hypothesis import given, settings

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.grid import norm_linf, sample
from src.pdelab.linalg_iter import (
    SparseMatrix,
    ZeroDiagonalError,
    assemble_laplace_2d,
    gauss_seidel_sweep,
    jacobi_sweep,
    laplace_spectrum,
    predicted_iteration_count,
    predicted_spectral_radius,
    solve_iterative,
    tridiag_eigenvalues,
)


def harmonic_xy(x, y):
    return x * y


def harmonic_x2y2(x, y):
    return x * x - y * y


@pytest.mark.parametrize("N", range(2, 9))
def test_laplace_spectrum_matches_dense_eigenvalues(N):
    dense = assemble_laplace_2d(N).matrix.to_dense()
    expected = np.linalg.eigvalsh(dense)
    got = np.sort(laplace_spectrum(N))
    assert got.shape == expected.shape
    assert np.max(np.abs(got - expected)) < 1e-9


@pytest.mark.parametrize("n", [1, 3, 7])
def test_tridiag_eigenvalues_match_dense(n):
    T = np.diag(np.full(n, 2.5)) + np.diag(np.full(n - 1, -1.0), 1) + np.diag(np.full(n - 1, -1.0), -1)
    assert np.sort(tridiag_eigenvalues(2.5, -1.0, n)) == pytest.approx(np.linalg.eigvalsh(T), abs=1e-12)


def test_assembled_matrix_structure():
    A = assemble_laplace_2d(4).matrix
    assert A.n_rows == A.n_cols == 9
    assert np.all(A.csr.diagonal() == -4.0)
    assert np.array_equal(A.to_dense(), A.transpose().to_dense())
    for r in range(A.n_rows):
        cols = A.col_indices[A.row_offsets[r]:A.row_offsets[r + 1]]
        assert np.all(np.diff(cols) > 0)
    assert np.all(A.data != 0.0)


def test_sparse_matrix_drops_explicit_zeros():
    raw = sp.csr_matrix((np.array([2.0, 0.0, 3.0]), np.array([0, 1, 1]), np.array([0, 2, 3])), shape=(2, 2))
    assert raw.nnz == 3
    A = SparseMatrix(raw)
    assert A.data.size == 2
    assert A.to_dense() == pytest.approx(np.array([[2.0, 0.0], [0.0, 3.0]]))


def test_zero_diagonal_is_reported():
    A = SparseMatrix(sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 2.0]])))
    with pytest.raises(ZeroDiagonalError):
        jacobi_sweep(A, np.ones(2), np.zeros(2))
    with pytest.raises(ZeroDiagonalError):
        solve_iterative(A, np.ones(2), "gauss-seidel")


def test_single_sweeps_agree_on_diagonal_system():
    A = SparseMatrix(sp.diags([2.0, 4.0, 8.0]).tocsr())
    b = np.array([2.0, 4.0, 8.0])
    assert jacobi_sweep(A, b, np.zeros(3)) == pytest.approx(np.ones(3))
    assert gauss_seidel_sweep(A, b, np.zeros(3)) == pytest.approx(np.ones(3))


def test_gauss_seidel_sweep_uses_updated_values():
    A = SparseMatrix(sp.csr_matrix(np.array([[2.0, -1.0], [-1.0, 2.0]])))
    b = np.array([1.0, 1.0])
    x = gauss_seidel_sweep(A, b, np.zeros(2))
    assert x == pytest.approx([0.5, 0.75])


@pytest.mark.parametrize("method", ["jacobi", "gauss-seidel"])
def test_iterative_solution_reproduces_quadratic_harmonic(method):
    N = 16
    system = assemble_laplace_2d(N)
    x, report = solve_iterative(system.matrix, system.rhs(harmonic_x2y2), method, tol=1e-8)
    assert report.converged
    assert report.residual_history[-1] < 1e-8
    err = norm_linf(system.embed(x, harmonic_x2y2) - sample(harmonic_x2y2, system.grid))
    assert err < 2e-8 * N * N / 8.0


def test_gauss_seidel_needs_about_half_the_jacobi_sweeps():
    N = 16
    system = assemble_laplace_2d(N)
    b = system.rhs(harmonic_xy)
    _, jac = solve_iterative(system.matrix, b, "jacobi", tol=1e-8)
    _, gs = solve_iterative(system.matrix, b, "gauss-seidel", tol=1e-8)
    assert 0.4 <= gs.iterations / jac.iterations <= 0.6
    predicted = predicted_spectral_radius("jacobi", N)
    assert abs(jac.estimated_rho - predicted) <= 0.1 * predicted


def test_iteration_cap_leaves_report_unconverged():
    system = assemble_laplace_2d(8)
    _, report = solve_iterative(system.matrix, system.rhs(harmonic_xy), "jacobi", tol=1e-12, max_iter=5)
    assert report.iterations == 5
    assert not report.converged
    assert len(report.residual_history) == 6


def test_matrix_export_is_matrix_market(tmp_path):
    path = assemble_laplace_2d(3).matrix.export(tmp_path / "laplace.mtx")
    assert path.read_text(encoding="utf-8").startswith("%%MatrixMarket")


@pytest.mark.parametrize("predict", [predicted_spectral_radius, predicted_iteration_count])
def test_predictions_reject_unknown_methods(predict):
    with pytest.raises(ValueError):
        predict("sor", 8)


@given(
    alpha=st.floats(min_value=-5.0, max_value=5.0),
    beta=st.floats(min_value=-5.0, max_value=5.0),
    seed=st.integers(min_value=0, max_value=2 ** 16),
)
@settings(max_examples=50, deadline=None)
def test_jacobi_sweep_is_linear_in_data_and_iterate(alpha, beta, seed):
    A = assemble_laplace_2d(6).matrix
    n = A.to_dense().shape[0]
    rng = np.random.default_rng(seed)
    b1, b2, x1, x2 = rng.standard_normal((4, n))
    combined = jacobi_sweep(A, alpha * b1 + beta * b2, alpha * x1 + beta * x2)
    expected = alpha * jacobi_sweep(A, b1, x1) + beta * jacobi_sweep(A, b2, x2)
    assert np.max(np.abs(combined - expected)) < 1e-10
