import cmath
import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.profiles import parse_profile
from src.pdelab.stationary_phase import (
    DegenerateStationaryPointError,
    GaussianPacket,
    KleinGordon,
    OscillatoryIntegral,
    kg_farfield,
    kg_mode_superposition,
    oscillatory_quadrature,
    packet_peak,
    stationary_phase_eval,
    wave_packet_exact,
    wave_packet_predicted,
)


def _gaussian_chirp(k):
    return OscillatoryIntegral(
        lambda t: math.exp(-t * t),
        lambda t: t * t,
        k,
        -3.0,
        3.0,
        dphi=lambda t: 2.0 * t,
        d2phi=lambda t: 2.0,
    )


def test_single_interior_stationary_point():
    result = stationary_phase_eval(_gaussian_chirp(200.0))
    assert len(result.points) == 1
    assert result.points[0].t0 == pytest.approx(0.0, abs=1e-10)
    assert result.points[0].d2 == 2.0
    assert result.value == pytest.approx(math.sqrt(math.pi / 200.0) * cmath.exp(0.25j * math.pi))


def test_asymptotic_error_shrinks_with_frequency():
    errors = []
    for k in (50.0, 200.0):
        integral = _gaussian_chirp(k)
        numeric = oscillatory_quadrature(integral)
        exact = cmath.sqrt(math.pi / (1.0 - 1j * k))
        assert abs(numeric - exact) < 1e-5
        errors.append(abs(stationary_phase_eval(integral).value - numeric) / abs(numeric))
    assert errors[1] < errors[0] < 0.05


def test_finite_difference_curvature_is_used_without_derivatives():
    integral = OscillatoryIntegral(lambda t: 1.0, lambda t: math.cos(t), 40.0, 1.0, 5.0)
    result = stationary_phase_eval(integral)
    assert result.points[0].t0 == pytest.approx(math.pi, abs=1e-6)
    assert result.points[0].d2 == pytest.approx(1.0, rel=1e-5)


def test_degenerate_stationary_point_is_rejected():
    integral = OscillatoryIntegral(
        lambda t: 1.0,
        lambda t: t ** 4 / 4.0,
        100.0,
        -1.0,
        1.1,
        dphi=lambda t: t ** 3,
        d2phi=lambda t: 3.0 * t * t,
    )
    with pytest.raises(DegenerateStationaryPointError):
        stationary_phase_eval(integral)


def test_monotone_phase_has_no_stationary_point():
    integral = OscillatoryIntegral(lambda t: 1.0, lambda t: t, 50.0, 0.0, 1.0, dphi=lambda t: 1.0)
    result = stationary_phase_eval(integral)
    assert result.riemann_lebesgue
    assert result.value == 0


def test_oscillatory_integral_validates_range():
    with pytest.raises(ValueError):
        OscillatoryIntegral(lambda t: 1.0, lambda t: t, 1.0, 1.0, 0.0)


def test_klein_gordon_stationary_wavenumber():
    kg = KleinGordon(1.0, 1.0)
    lam = kg.stationary_lambda(0.3)
    assert float(kg.group_velocity(lam)) == pytest.approx(0.3)
    assert kg.stationary_lambda(1.2) is None


def test_far_field_is_zero_outside_the_light_cone():
    far = kg_farfield(parse_profile("gaussian(1,1,0.5)"), 1.0, 1.0, 250.0, 100.0)
    assert not far.inside_cone
    assert far.value == 0


def test_far_field_decays_like_inverse_square_root():
    F = parse_profile("gaussian(1,1,0.5)")
    amps = {t: abs(kg_mode_superposition(F, 1.0, 1.0, 0.3 * t, t, -8.0, 8.0)) for t in (100.0, 400.0)}
    slope = math.log(amps[400.0] / amps[100.0]) / math.log(4.0)
    assert slope == pytest.approx(-0.5, abs=0.05)
    far = kg_farfield(F, 1.0, 1.0, 120.0, 400.0)
    assert far.inside_cone
    assert abs(far.value) == pytest.approx(amps[400.0], rel=0.05)


def test_packet_starts_as_modulated_gaussian():
    packet = GaussianPacket(1.0, 0.1)
    x = np.linspace(-5.0, 5.0, 11)
    assert wave_packet_exact(packet, x, 0.0) == pytest.approx(wave_packet_predicted(packet, x, 0.0), abs=1e-8)


def test_packet_moves_at_group_velocity():
    packet = GaussianPacket(1.0, 0.1)
    assert packet.group_velocity == pytest.approx(1.0 / math.sqrt(2.0))
    peak = packet_peak(packet, 50.0, np.linspace(20.0, 50.0, 601))
    assert peak == pytest.approx(packet.group_velocity * 50.0, rel=0.02)
