import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.profiles import parse_profile
from src.pdelab.spectral import (
    ConstantForcing,
    ModeSet,
    SinusoidalForcing,
    SpectralError,
    boundary_forcing_sine,
    disk_inverse,
    disk_transform,
    duhamel_heat,
    duhamel_wave,
    forward,
    galerkin_couplings,
    inverse,
    nonlinear_heat_galerkin,
    periodic_eigenvalues,
    resonance_sweep,
    riccati_single_mode,
    solve_heat_lifted,
    solve_hyperbolic_modes,
    solve_parabolic_modes,
    stationary_limit,
    uniform_data_solution,
)


def test_forward_and_inverse_of_a_single_sine():
    modes = ModeSet.sine(4)
    coeffs = forward(parse_profile("sin(2,1)"), modes)
    assert coeffs.values == pytest.approx([0.0, 1.0 / math.sqrt(2.0), 0.0, 0.0], abs=1e-10)
    assert inverse(coeffs, modes)(0.25) == pytest.approx(1.0, abs=1e-10)


def test_inverse_checks_coefficient_count():
    with pytest.raises(SpectralError):
        inverse([1.0, 2.0], ModeSet.sine(3))


def test_sine_mode_eigenvalues():
    modes = ModeSet.sine(3, l=2.0, c=3.0)
    assert modes.eigenvalues == pytest.approx([(math.pi * k * 3.0 / 2.0) ** 2 for k in (1, 2, 3)])


def test_parabolic_modes_decay_exponentially():
    modes = ModeSet.sine(3)
    N0 = np.array([1.0, 2.0, 3.0])
    N = solve_parabolic_modes(modes, N0, 0.1).values
    assert N == pytest.approx(N0 * np.exp(-modes.eigenvalues * 0.1))


def test_constant_forcing_reaches_steady_state():
    modes = ModeSet.sine(2)
    F = ConstantForcing(np.array([1.0, 4.0]))
    N = solve_parabolic_modes(modes, [0.0, 0.0], 50.0, F).values
    assert N == pytest.approx(F.amplitudes / modes.eigenvalues)


@pytest.mark.parametrize("omega", [1.3, 2.0])
def test_sinusoidal_forcing_closed_form_matches_convolution(omega):
    modes = ModeSet(np.array([4.0]), [np.sin], 1.0)
    closed = solve_hyperbolic_modes(modes, [0.0], [0.0], 2.7, SinusoidalForcing(np.array([1.0]), omega)).values
    generic = solve_hyperbolic_modes(modes, [0.0], [0.0], 2.7, lambda tau: np.array([math.sin(omega * tau)])).values
    assert closed == pytest.approx(generic, abs=1e-9)


def test_sinusoidal_forcing_off_resonance_formula():
    lam, omega, t = 4.0, 1.3, 2.7
    modes = ModeSet(np.array([lam]), [np.sin], 1.0)
    N = solve_hyperbolic_modes(modes, [0.0], [0.0], t, SinusoidalForcing(np.array([1.0]), omega)).values[0]
    w = math.sqrt(lam)
    expected = (math.sin(omega * t) - omega / w * math.sin(w * t)) / (lam - omega * omega)
    assert N == pytest.approx(expected)


def test_parabolic_sinusoidal_forcing_matches_convolution():
    modes = ModeSet.sine(2)
    closed = solve_parabolic_modes(modes, [0.0, 0.0], 0.8, SinusoidalForcing(np.array([1.0, 0.5]), 3.0)).values
    generic = solve_parabolic_modes(modes, [0.0, 0.0], 0.8,
                                    lambda tau: np.array([1.0, 0.5]) * math.sin(3.0 * tau)).values
    assert closed == pytest.approx(generic, abs=1e-9)


def test_resonance_sweep_peaks_at_natural_frequency():
    omegas = np.linspace(1.0, 3.0, 9)
    peaks = resonance_sweep(4.0, omegas, 60.0)
    assert omegas[int(np.argmax(peaks))] == pytest.approx(2.0)


def test_lifted_heat_tends_to_linear_profile():
    u = solve_heat_lifted(lambda x: np.zeros_like(x), lambda t: 1.0, None, 2.0, K=50)
    assert u(0.3) == pytest.approx(0.7, abs=1e-6)


def test_boundary_forcing_of_sine_modes():
    modes = ModeSet.sine(3)
    B = boundary_forcing_sine(modes, lambda t: 1.0, lambda t: 2.0 * t, c2=0.5)
    k = np.arange(1, 4)
    slope = math.sqrt(2.0) * math.pi * k
    assert B(1.5) == pytest.approx(0.5 * (slope - 3.0 * slope * (-1.0) ** k))
    with pytest.raises(SpectralError):
        boundary_forcing_sine(ModeSet.cosine(3), None, None)


def test_endpoint_transform_agrees_with_lift_inside():
    zero = lambda x: np.zeros_like(x)
    one = lambda t: 1.0
    lifted = solve_heat_lifted(zero, one, None, 0.1, K=50)
    direct = solve_heat_lifted(zero, one, None, 0.1, K=200, boundary="transform")
    for x in (0.3, 0.5, 0.7):
        assert direct(x) == pytest.approx(lifted(x), abs=1e-2)
    assert direct(0.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(SpectralError):
        solve_heat_lifted(zero, one, None, 0.1, boundary="mirror")


def test_duhamel_wave_with_unit_source():
    u = duhamel_wave(lambda x, t: 1.0, c=2.0)
    assert u(0.3, 1.5) == pytest.approx(1.5 ** 2 / 2.0, abs=1e-8)
    assert u(0.3, 0.0) == 0.0
    with_data = duhamel_wave(lambda x, t: 1.0, f=lambda x: np.cos(x))
    expected = 0.5 * (math.cos(0.3 - 0.8) + math.cos(0.3 + 0.8)) + 0.8 ** 2 / 2.0
    assert with_data(0.3, 0.8) == pytest.approx(expected, abs=1e-8)


def test_duhamel_heat_single_mode_source():
    modes = ModeSet.sine(5)
    source = lambda x, t: modes.functions[1](x)
    u = duhamel_heat(source, modes)
    lam = (2.0 * math.pi) ** 2
    t = 0.05
    expected = -math.expm1(-lam * t) / lam * math.sqrt(2.0) * math.sin(2.0 * math.pi * 0.3)
    assert u(0.3, t) == pytest.approx(expected, abs=1e-8)


def test_disk_transform_round_trip():
    r = np.array([0.5, 1.0])
    u = lambda R, T: R * R * np.cos(2.0 * T)
    coeffs = disk_transform(u, r, n_theta=64, K=8)
    assert coeffs.a[:, 1] == pytest.approx(r * r * math.sqrt(math.pi))
    theta = np.linspace(0.0, 2.0 * math.pi, 7)
    assert disk_inverse(coeffs, theta) == pytest.approx(u(r[:, None], theta[None, :]), abs=1e-12)


def test_disk_transform_needs_enough_angles():
    with pytest.raises(SpectralError):
        disk_transform(lambda R, T: R, [1.0], n_theta=16, K=8)


def test_periodic_eigenvalues_are_doubled():
    assert periodic_eigenvalues(2) == [(0.0, 1), (1.0, 2), (4.0, 2)]


def test_single_mode_coupling():
    assert galerkin_couplings(1)[0, 0, 0, 0] == pytest.approx(3.0 / (2.0 * math.pi))


def test_couplings_are_symmetric():
    T = galerkin_couplings(3)
    assert T[0, 1, 2, 1] == pytest.approx(T[2, 1, 1, 0])
    assert T[0, 0, 1, 1] == pytest.approx(1.0 / math.pi)


@pytest.mark.parametrize("K", [0, 33])
def test_truncation_range(K):
    with pytest.raises(SpectralError):
        galerkin_couplings(K)


def test_single_mode_galerkin_matches_riccati():
    run = nonlinear_heat_galerkin(2.0, 1.0, [0.5], 1, 5.0)
    assert run.blow_up is None
    exact = riccati_single_mode(2.0, 1.0, 0.5, run.times)
    assert np.max(np.abs(run.mode(1) - exact)) < 1e-6


def test_single_mode_saturates_at_stationary_value():
    run = nonlinear_heat_galerkin(2.0, 1.0, [0.1], 1, 30.0)
    assert run.final[0] == pytest.approx(stationary_limit(2.0, 1.0), rel=1e-8)
    assert stationary_limit(2.0, 1.0) == pytest.approx(math.sqrt(math.pi / 3.0))


def test_subcritical_growth_rate_decays():
    run = nonlinear_heat_galerkin(0.5, 1.0, [0.5, 0.1, 0.05], 3, 10.0)
    assert np.max(np.abs(run.final)) < 0.01
    assert stationary_limit(0.5, 1.0) == 0.0


def test_galerkin_initial_data_from_profile():
    run = nonlinear_heat_galerkin(2.0, 1.0, parse_profile("sin(1,3.141592653589793)"), 3, 0.01)
    assert run.coeffs[0] == pytest.approx([math.sqrt(math.pi / 2.0), 0.0, 0.0], abs=1e-8)


def test_galerkin_checks_coefficient_count():
    with pytest.raises(SpectralError):
        nonlinear_heat_galerkin(2.0, 1.0, [0.5, 0.1], 3, 1.0)


def test_riccati_needs_nonzero_growth():
    with pytest.raises(SpectralError):
        riccati_single_mode(1.0, 1.0, 0.5, 1.0)


def test_uniform_solution_limits():
    assert uniform_data_solution(3.0, 0.2, 0.0) == pytest.approx(0.2)
    assert uniform_data_solution(3.0, 0.2, 50.0) == pytest.approx(1.0)
