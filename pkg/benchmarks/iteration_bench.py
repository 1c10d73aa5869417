import os
import sys
import time

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.linalg_iter import (
    assemble_laplace_2d,
    predicted_iteration_count,
    predicted_spectral_radius,
    solve_iterative,
)


def harmonic(x, y):
    return x * x - y * y


def benchmark_case(N, method, tol=1e-8):
    system = assemble_laplace_2d(N)
    b = system.rhs(harmonic)
    start = time.perf_counter()
    x, report = solve_iterative(system.matrix, b, method, tol=tol, max_iter=200_000)
    duration = time.perf_counter() - start
    if not report.converged:
        raise AssertionError(f"{method} N={N} did not converge")
    print(
        f"{method:>12} N={N:<3d}: {report.iterations:6d} sweeps in {duration:.4f}s, "
        f"rho~{report.estimated_rho:.5f} (predicted {predicted_spectral_radius(method, N):.5f}, "
        f"model count ~{predicted_iteration_count(method, N):.0f})"
    )
    return report.iterations, duration


def run():
    for N in (8, 16, 32, 64):
        jac, _ = benchmark_case(N, "jacobi")
        gs, _ = benchmark_case(N, "gauss-seidel")
        print(f"{'':>12} N={N:<3d}: gauss-seidel / jacobi = {gs / jac:.3f}")


if __name__ == "__main__":
    run()
