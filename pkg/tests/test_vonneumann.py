import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.vonneumann import (
    BUILTIN_SYMBOLS,
    DispersionError,
    PDECoefficients,
    SymbolError,
    amplification_factors,
    classify_mode_type,
    dispersion,
    scheme_stability,
    stability_index,
    stability_threshold,
)


def test_heat_explicit_threshold_is_one_half():
    s = stability_threshold(BUILTIN_SYMBOLS["heat-explicit"], 0.1, 1.0)
    assert s == pytest.approx(0.5, abs=1e-6)


def test_wave_leapfrog_threshold_is_one():
    s = stability_threshold(BUILTIN_SYMBOLS["wave-leapfrog"], 0.5, 2.0)
    assert s == pytest.approx(1.0, abs=1e-6)


def test_advection_leapfrog_threshold_is_one():
    nu = stability_threshold(BUILTIN_SYMBOLS["advection-leapfrog"], 0.5, 1.5)
    assert nu == pytest.approx(1.0, abs=1e-6)


def test_threshold_needs_a_bracket():
    with pytest.raises(SymbolError):
        stability_threshold(BUILTIN_SYMBOLS["heat-explicit"], 0.1, 0.3)


@pytest.mark.parametrize("s", [1.0, 10.0, 100.0])
def test_crank_nicolson_is_unconditionally_stable(s):
    verdict = scheme_stability(BUILTIN_SYMBOLS["crank-nicolson"], {"s": s})
    assert verdict.stable


def test_heat_explicit_verdicts():
    symbol = BUILTIN_SYMBOLS["heat-explicit"]
    assert scheme_stability(symbol, {"s": 0.4}).stable
    bad = scheme_stability(symbol, {"s": 0.6})
    assert not bad.stable
    assert bad.classification == "unstable"
    assert bad.max_modulus == pytest.approx(abs(1.0 - 4.0 * 0.6), rel=1e-6)


def test_wave_leapfrog_is_neutral_below_threshold():
    verdict = scheme_stability(BUILTIN_SYMBOLS["wave-leapfrog"], {"s": 0.81})
    assert verdict.stable
    assert verdict.max_modulus == pytest.approx(1.0, abs=1e-9)
    assert verdict.classification.startswith("neutrally stable")


def test_amplification_factors_of_explicit_heat():
    factors = amplification_factors(BUILTIN_SYMBOLS["heat-explicit"], math.pi, {"s": 0.25})
    assert len(factors) == 1
    assert factors[0] == pytest.approx(0.0, abs=1e-12)


def test_too_few_angles_rejected():
    with pytest.raises(SymbolError):
        scheme_stability(BUILTIN_SYMBOLS["heat-explicit"], {"s": 0.4}, n_theta=16)


def test_heat_equation_is_strictly_stable():
    verdict = stability_index(PDECoefficients.heat(1.0))
    assert verdict.stable
    assert verdict.omega <= 0.0


def test_backward_heat_is_ill_posed():
    verdict = stability_index(PDECoefficients(A=1.0, E=1.0))
    assert not verdict.stable
    assert verdict.classification == "ill-posed"
    assert verdict.omega == math.inf


def test_klein_gordon_is_conservative_and_dispersive():
    coeffs = PDECoefficients.klein_gordon(1.0, 1.0)
    assert stability_index(coeffs).stable
    assert classify_mode_type(coeffs) == "conservative"
    rel = dispersion(coeffs)
    assert rel.dispersive
    assert rel.omega(1.0) == pytest.approx(math.sqrt(2.0))
    assert rel.group_velocity(1.0) == pytest.approx(1.0 / math.sqrt(2.0))
    assert rel.group_velocity_fd(1.0) == pytest.approx(rel.group_velocity(1.0), rel=1e-6)


def test_wave_equation_is_not_dispersive():
    rel = dispersion(PDECoefficients(A=-1.0, C=1.0))
    assert not rel.dispersive
    assert rel.phase_speed(2.0) == pytest.approx(1.0)


def test_dispersion_needs_conservative_equation():
    with pytest.raises(DispersionError):
        dispersion(PDECoefficients.heat(1.0))


def test_coefficients_need_a_time_derivative():
    with pytest.raises(SymbolError):
        PDECoefficients(A=1.0)
