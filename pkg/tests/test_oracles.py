import math
import os
import sys

import numpy as np
import pytest
from scipy import integrate, special

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.oracles import (
    OracleError,
    SturmLiouville,
    dalembert,
    erf_solution,
    fourier_coeffs,
    halfline_heat,
    halfline_wave,
    halfplane_heaviside,
    heat_kernel,
    heat_series,
    image_series_heat,
    laplace_halfplane,
    laplace_rectangle_series,
    legendre,
    legendre_norm2,
    ode_green_solve,
    sl_shoot,
    wave_series,
)
from src.pdelab.profiles import parse_profile

HAT = parse_profile("hat")


def test_heat_kernel_has_unit_mass():
    mass, _ = integrate.quad(lambda x: float(heat_kernel(x, 0.3, 1.5)), -np.inf, np.inf)
    assert mass == pytest.approx(1.0, abs=1e-10)


def test_heat_kernel_needs_positive_time():
    with pytest.raises(OracleError):
        heat_kernel(0.0, 0.0)


def test_dalembert_initial_and_velocity_data():
    f = parse_profile("gaussian(1,1,0)")
    assert dalembert(f, None, 1.0, 0.4, 0.0) == pytest.approx(float(f(0.4)))
    # unit initial velocity only: u = t
    assert dalembert(parse_profile("const(0)"), parse_profile("const(1)"), 2.0, 0.1, 0.7) == pytest.approx(0.7)


def test_dalembert_rejects_nonpositive_speed():
    with pytest.raises(OracleError):
        dalembert(HAT, None, 0.0, 0.5, 1.0)


def test_halfplane_heaviside_limits():
    assert halfplane_heaviside(0.0, 1.0) == pytest.approx(0.5)
    assert halfplane_heaviside(1.0, 1e-12) == pytest.approx(1.0, abs=1e-9)
    assert halfplane_heaviside(-1.0, 1e-12) == pytest.approx(0.0, abs=1e-9)


def test_poisson_kernel_of_an_indicator():
    u = laplace_halfplane(lambda s: np.ones_like(s), support=(0.0, 1.0))
    for x, y in ((0.3, 0.5), (2.0, 0.1), (-1.0, 3.0)):
        expected = halfplane_heaviside(x, y) - halfplane_heaviside(x - 1.0, y)
        assert u(x, y) == pytest.approx(float(expected), abs=1e-8)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0])
def test_halfline_heat_with_constant_initial_data_is_erf(x):
    u = halfline_heat(parse_profile("const(1)"), None)
    assert u(x, 0.5) == pytest.approx(float(erf_solution(1.0)(x, 0.5)), abs=1e-8)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0])
def test_halfline_heat_with_constant_boundary_is_erfc(x):
    u = halfline_heat(None, parse_profile("const(1)"))
    assert u(x, 0.5) == pytest.approx(float(special.erfc(x / (2.0 * math.sqrt(0.5)))), abs=1e-8)


def test_halfline_heat_rejects_points_outside_domain():
    u = halfline_heat(HAT, None)
    with pytest.raises(OracleError):
        u(-0.1, 1.0)
    with pytest.raises(OracleError):
        u(0.5, 0.0)


def test_image_series_matches_fourier_series():
    images = image_series_heat(HAT, J=3)
    series = heat_series(HAT, K=200)
    for x in (0.25, 0.5, 0.8):
        assert images(x, 0.01) == pytest.approx(float(series(x, 0.01)), abs=1e-7)


def test_fourier_energy_is_monotone_and_bounded():
    series = fourier_coeffs(HAT, "sine", 1.0, 60)
    energies = [series.energy(K) for K in range(1, 61)]
    assert all(b >= a for a, b in zip(energies[:-1], energies[1:]))
    norm2 = 1.0 / 3.0
    assert energies[-1] <= norm2 + 1e-12
    assert energies[-1] == pytest.approx(norm2, abs=1e-5)


def test_fourier_reconstruction_of_hat():
    series = fourier_coeffs(HAT, "sine", 1.0, 200)
    assert series(0.25) == pytest.approx(0.5, abs=5e-3)


def test_unknown_basis_rejected():
    with pytest.raises(OracleError):
        fourier_coeffs(HAT, "chebyshev")


def test_wave_series_energy_is_conserved():
    sol = wave_series(HAT, parse_profile("sin(1,1)"), K=50)
    assert sol.energy(0.37) == pytest.approx(sol.energy(0.0), rel=1e-12)


def test_laplace_rectangle_single_mode():
    sol = laplace_rectangle_series(parse_profile("sin(1,1)"), None, K=5)
    exact = math.sin(0.5 * math.pi) * math.sinh(math.pi * 0.7) / math.sinh(math.pi)
    assert float(sol(0.5, 0.3)) == pytest.approx(exact, abs=1e-8)


def test_dirichlet_sturm_liouville_eigenpairs():
    pairs = sl_shoot(SturmLiouville.dirichlet(1.0), 1.0, 260.0)
    lams = [p.lam for p in pairs]
    assert lams == pytest.approx([(math.pi * k) ** 2 for k in range(1, 6)], rel=1e-6)
    for p in pairs:
        assert p.norm2 == pytest.approx(1.0, rel=1e-8)
        assert p.values[1] > 0
    x = pairs[0].x
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            assert abs(integrate.simpson(pairs[i].values * pairs[j].values, x=x)) < 1e-6


def test_neumann_sturm_liouville_includes_zero():
    pairs = sl_shoot(SturmLiouville.neumann(1.0), -0.5, 50.0)
    assert [p.lam for p in pairs] == pytest.approx([0.0, math.pi ** 2, 4 * math.pi ** 2], abs=1e-6)


def test_sturm_liouville_rejects_bad_boundary_coefficients():
    one = lambda x: 1.0
    with pytest.raises(OracleError):
        SturmLiouville(one, one, one, 0.0, 0.0, 1.0, 0.0)


def test_ode_green_solution():
    assert ode_green_solve(2.0, 2.0)(0.3) == pytest.approx(0.5)
    # f = 1 on [-1, 1]: y(0) = (1 - e^{-k}) / k^2
    y = ode_green_solve(lambda s: np.ones_like(s), 1.5, support=(-1.0, 1.0))
    assert y(0.0) == pytest.approx((1.0 - math.exp(-1.5)) / 1.5 ** 2, abs=1e-9)


def test_halfline_wave_is_a_delayed_signal():
    u = halfline_wave(parse_profile("sin(1,1)"), 2.0)
    assert u(1.0, 0.4) == 0.0
    assert u(1.0, 0.75) == pytest.approx(math.sin(0.25 * math.pi))


def test_legendre_orthogonality():
    inner, _ = integrate.quad(lambda x: legendre(2, x) * legendre(3, x), -1.0, 1.0)
    norm, _ = integrate.quad(lambda x: legendre(3, x) ** 2, -1.0, 1.0)
    assert inner == pytest.approx(0.0, abs=1e-12)
    assert norm == pytest.approx(legendre_norm2(3))
    with pytest.raises(OracleError):
        legendre(-1, 0.0)
