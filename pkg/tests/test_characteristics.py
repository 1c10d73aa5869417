import math
import os
import sys

import numpy as np
import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
from src.pdelab.characteristics import (
    CharacteristicError,
    CharacteristicProblem,
    InversionError,
    PostShockError,
    burgers_implicit,
    conserved_cubic_problem,
    conserved_cubic_solution,
    detect_characteristic_points,
    evaluate_solution,
    integrate_family,
    jacobian_shock_time,
    shock_time,
)
from src.pdelab.profiles import parse_profile


@pytest.mark.parametrize(
    "spec,lo,hi,expected",
    [
        ("linear(-1,0)", -2.0, 2.0, 1.0),
        ("sin(1,3.141592653589793)", 0.0, 2.0 * math.pi, 1.0),
        ("tent", -2.0, 2.0, 1.0),
        ("runge", -3.0, 3.0, 8.0 * math.sqrt(3.0) / 9.0),
        ("sech", -3.0, 3.0, 2.0),
    ],
)
def test_shock_time_of_reference_profiles(spec, lo, hi, expected):
    phi = parse_profile(spec)
    report = shock_time(phi, phi.derivative, lo, hi)
    assert report.t_star == pytest.approx(expected, abs=1e-8)
    assert report.method == "analytic-formula"


def test_shock_time_of_increasing_profile_is_infinite():
    phi = parse_profile("linear(1,0)")
    report = shock_time(phi, phi.derivative, -1.0, 1.0)
    assert report.t_star == math.inf
    assert report.note == "no breakdown"
    assert report.as_dict()["t_star"] == "inf"


def test_shock_time_needs_enough_samples():
    phi = parse_profile("tent")
    with pytest.raises(CharacteristicError):
        shock_time(phi, phi.derivative, -2.0, 2.0, n=10)


def test_burgers_implicit_solves_the_characteristic_equation():
    phi = parse_profile("tent")
    for x, t in ((0.5, 0.5), (-0.3, 0.8), (0.9, 0.2)):
        u = burgers_implicit(phi, x, t, dphi=phi.derivative, t_star=1.0)
        assert u == pytest.approx(float(phi(x - u * t)), abs=1e-10)


def test_burgers_implicit_refuses_times_past_the_shock():
    phi = parse_profile("tent")
    with pytest.raises(PostShockError):
        burgers_implicit(phi, 0.5, 1.2, t_star=1.0)


def test_burgers_implicit_computes_shock_time_when_not_given():
    with pytest.raises(PostShockError) as info:
        burgers_implicit(lambda x: -x, 0.5, 2.0)
    assert info.value.t_star == pytest.approx(1.0, abs=1e-4)

    phi = parse_profile("tent")
    u = burgers_implicit(phi, 0.5, 0.5)
    assert u == pytest.approx(float(phi(0.5 - u * 0.5)), abs=1e-10)


@pytest.mark.parametrize("fraction", [0.5, 0.8, 0.9])
def test_burgers_gradient_grows_like_inverse_time_to_shock(fraction):
    phi = parse_profile("gaussian(1,1,0)")
    t_star = shock_time(phi, phi.derivative, -5.0, 5.0).t_star
    t = fraction * t_star
    tau0 = 1.0 / math.sqrt(2.0)
    xs = np.append(np.linspace(-1.0, 3.0, 201), tau0 + t * float(phi(tau0)))
    h = 1e-5

    def u(x):
        return burgers_implicit(phi, x, t, dphi=phi.derivative, t_star=t_star)

    slope = max(abs(u(x + h) - u(x - h)) / (2 * h) for x in xs)
    assert 0.5 <= (t_star - t) * slope <= 2.0


def test_transport_family_is_straight_lines():
    phi = parse_profile("gaussian(1,1,0)")
    problem = CharacteristicProblem.transport(2.0, phi, -1.0, 1.0)
    family = integrate_family(problem, 11, 20, 1.5)
    assert family.x[-1] == pytest.approx(family.taus + 3.0)
    assert family.t[-1] == pytest.approx(np.full(11, 1.5))
    assert family.u[-1] == pytest.approx(phi(family.taus))
    assert not family.truncated
    assert len(family.polylines(5)) == 3


def test_transport_solution_is_recovered_by_inversion():
    phi = parse_profile("gaussian(1,1,0)")
    family = integrate_family(CharacteristicProblem.transport(1.0, phi, -3.0, 3.0), 61, 40, 2.0)
    u = evaluate_solution(family, 0.7, 1.0)
    assert u == pytest.approx(float(phi(-0.3)), abs=1e-8)


def test_inversion_fails_on_a_characteristic_curve():
    problem = CharacteristicProblem(
        lambda x, t, u: np.ones_like(x),
        lambda x, t, u: np.ones_like(x),
        lambda x, t, u: np.zeros_like(x),
        lambda tau: tau,
        lambda tau: tau,
        parse_profile("tent"),
        -1.0,
        1.0,
    )
    family = integrate_family(problem, 11, 10, 1.0)
    with pytest.raises(InversionError):
        evaluate_solution(family, 0.5, 0.5)


def test_characteristic_initial_curve_is_detected():
    problem = CharacteristicProblem(
        lambda x, t, u: np.ones_like(x),
        lambda x, t, u: np.ones_like(x),
        lambda x, t, u: np.zeros_like(x),
        lambda tau: tau,
        lambda tau: tau,
        parse_profile("tent"),
        -1.0,
        1.0,
        dx0=lambda tau: 1.0,
        dt0=lambda tau: 1.0,
    )
    assert detect_characteristic_points(problem).fully_characteristic


def test_initial_line_of_transport_is_not_characteristic():
    problem = CharacteristicProblem.transport(1.0, parse_profile("tent"), -1.0, 1.0)
    points = detect_characteristic_points(problem)
    assert points.taus == []
    assert not points.fully_characteristic


def test_initial_curve_touching_characteristics_at_one_point():
    # x0 = tau, t0 = tau^2 / 2 touches the slope-one characteristic at tau = 1
    problem = CharacteristicProblem(
        lambda x, t, u: np.ones_like(x),
        lambda x, t, u: np.ones_like(x),
        lambda x, t, u: np.zeros_like(x),
        lambda tau: tau,
        lambda tau: 0.5 * tau * tau,
        parse_profile("tent"),
        -0.5,
        2.0,
        dx0=lambda tau: 1.0,
        dt0=lambda tau: tau,
    )
    points = detect_characteristic_points(problem)
    assert points.taus == pytest.approx([1.0], abs=1e-8)


def test_jacobian_breakdown_of_burgers_tent():
    family = integrate_family(CharacteristicProblem.burgers(parse_profile("tent"), -2.0, 2.0), 401, 200, 1.5)
    report = jacobian_shock_time(family)
    assert report.method == "jacobian-zero"
    assert report.t_star == pytest.approx(1.0, rel=0.05)


def test_conserved_cubic_solution_is_constant_on_characteristics():
    phi = parse_profile("gaussian(1,1,0)")
    assert conserved_cubic_solution(phi, 0.4, 0.0) == pytest.approx(float(phi(0.4)))
    x0 = 0.3
    t = 0.8
    # x^3 + x - t^2 is invariant: pick x on the curve through x0
    target = x0 ** 3 + x0 + t * t
    xs = np.roots([1.0, 0.0, 1.0, -target])
    x = float(xs[np.argmin(np.abs(xs.imag))].real)
    assert conserved_cubic_solution(phi, x, t) == pytest.approx(float(phi(x0)), abs=1e-10)


def test_conserved_cubic_family_matches_exact_solution():
    phi = parse_profile("gaussian(1,1,0)")
    family = integrate_family(conserved_cubic_problem(phi, -1.0, 1.0), 21, 100, 0.2)
    for j in (3, 10, 17):
        x, t = family.x[-1, j], family.t[-1, j]
        assert family.u[-1, j] == pytest.approx(conserved_cubic_solution(phi, x, t), abs=1e-8)


@given(
    alpha=st.floats(min_value=-3.0, max_value=3.0),
    beta=st.floats(min_value=-3.0, max_value=3.0),
)
@settings(max_examples=20, deadline=None)
def test_transport_solution_is_linear_in_the_data(alpha, beta):
    phi1 = parse_profile("gaussian(1,1,0)")
    phi2 = parse_profile("sech")

    def solve(phi):
        family = integrate_family(CharacteristicProblem.transport(1.0, phi, -3.0, 3.0), 61, 40, 2.0)
        return evaluate_solution(family, 0.7, 1.0)

    combined = solve(lambda x: alpha * phi1(x) + beta * phi2(x))
    assert combined == pytest.approx(alpha * solve(phi1) + beta * solve(phi2), abs=1e-8)
