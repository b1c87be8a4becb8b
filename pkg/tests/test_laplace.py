"""Forward quadrature and numerical inversion against elementary transform pairs."""

import math

import numpy as np
import pytest

from pcflaplace import laplace
from pcflaplace.errors import ConvergenceError, DomainError
from pcflaplace.laplace import InversionConfig, QuadratureConfig


def test_forward_examples():
    assert laplace.forward_transform(lambda t: 1.0, 2.0) == pytest.approx(0.5, rel=1e-10)
    assert laplace.forward_transform(lambda t: math.exp(-3 * t), 1.0) == pytest.approx(0.25, rel=1e-10)
    assert laplace.forward_transform(lambda t: t, 1.0) == pytest.approx(1.0, rel=1e-10)


def test_forward_complex_s():
    s = 1.5 + 4.0j
    got = laplace.forward_transform(lambda t: math.exp(-t), s)
    assert abs(got - 1 / (s + 1)) < 1e-11


def test_forward_sqrt_substitution_handles_endpoint_singularity():
    cfg = QuadratureConfig(endpoint_substitution="sqrt")
    got = laplace.forward_transform(lambda t: 1 / math.sqrt(t), 2.0, cfg, envelope=(1.0, 0.0))
    assert got == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-10)


def test_forward_domain_and_budget():
    with pytest.raises(DomainError):
        laplace.forward_transform(lambda t: 1.0, -0.5)
    with pytest.raises(DomainError):
        laplace.forward_transform(lambda t: math.exp(2 * t), 1.0)
    tight = QuadratureConfig(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=2)
    with pytest.raises(ConvergenceError):
        laplace.forward_transform(lambda t: math.sin(40 * t) / math.sqrt(t + 1e-9), 1.0, tight)


def test_forward_is_linear():
    f = lambda t: math.exp(-t) * math.cos(t)
    g = lambda t: t * math.exp(-0.5 * t)
    a, b = 1.7, -0.4
    for s in (0.8, 2.0 + 1.0j):
        lhs = laplace.forward_transform(lambda t: a * f(t) + b * g(t), s)
        rhs = a * laplace.forward_transform(f, s) + b * laplace.forward_transform(g, s)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_forward_shift_rule():
    f = lambda t: math.exp(-2 * t) * (1 + t)
    a = 0.6
    for s in (1.0, 1.5 - 2.0j):
        lhs = laplace.forward_transform(lambda t: math.exp(a * t) * f(t), s)
        rhs = laplace.forward_transform(f, s - a)
        assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_inversion_config_validation():
    with pytest.raises(DomainError):
        InversionConfig(method="stehfest")
    with pytest.raises(DomainError):
        InversionConfig(node_count=4)
    with pytest.raises(DomainError):
        InversionConfig(node_count=200)
    with pytest.raises(DomainError):
        InversionConfig(working_tolerance=1e-3)
    with pytest.raises(DomainError):
        QuadratureConfig(max_subdivisions=20_000)
    with pytest.raises(DomainError):
        QuadratureConfig(endpoint_substitution="log")


@pytest.mark.parametrize("F, t, expected, tol", [
    (lambda s: 1 / s, 1.0, 1.0, 1e-10),
    (lambda s: 1 / (s + 2), 0.7, math.exp(-1.4), 1e-9),
    (lambda s: 1 / s ** 2, 3.0, 3.0, 1e-9),
])
def test_talbot_examples(F, t, expected, tol):
    assert abs(laplace.invert(F, t) - expected) <= tol * abs(expected)


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 2.0, 4.0])
def test_euler_and_talbot_agree_on_elementary_images(t):
    F = lambda s: (s + 1) / ((s + 1) ** 2 + 4)
    exact = math.exp(-t) * math.cos(2 * t)
    tal = laplace.invert(F, t, InversionConfig("talbot", 32, 1e-7))
    eul = laplace.invert(F, t, InversionConfig("euler", 32, 1e-7))
    assert abs(tal - exact) <= 1e-8 * max(abs(exact), 1e-2)
    assert abs(eul - exact) <= 1e-6 * max(abs(exact), 1e-2)


def test_shifted_contour_handles_pole_at_origin():
    F = lambda s: 1 / (s * (s + 1))
    t = 1.3
    got = laplace.invert(F, t, shift=0.5)
    assert got == pytest.approx(1 - math.exp(-t), rel=1e-9)


def test_inversion_rejects_bad_time_and_inconsistent_runs():
    with pytest.raises(DomainError):
        laplace.invert(lambda s: 1 / s, 0.0)
    # a non-analytic image makes the two node counts disagree
    with pytest.raises(ConvergenceError):
        laplace.invert(lambda s: np.abs(s.imag) + 1 / s, 1.0)


BATTERY = [
    lambda t: math.exp(-t),
    lambda t: t * math.exp(-2 * t),
    lambda t: math.exp(-0.5 * t) * math.sin(t),
]


@pytest.mark.parametrize("f", BATTERY)
def test_invert_of_forward_quadrature_recovers_original(f):
    cfg = InversionConfig("euler", 24, 1e-7)

    def image(s):
        return np.array([laplace.forward_transform(f, sk) for sk in np.atleast_1d(s)])

    for t in (0.1, 1.0, 4.0):
        got = laplace.invert(image, t, cfg, check=False)
        assert abs(got - f(t)) <= 1e-6 * max(abs(f(t)), 1e-3)


def test_round_trip_elementary_pair_machine_level():
    a = 1.3
    report = laplace.round_trip(
        "exp", lambda s: 1 / (s + a), lambda t: math.exp(-a * t),
        t_grid=[0.1, 0.5, 1.0, 2.0], s_grid=[0.5, 1.0, 2.0, 4.0])
    assert report.passed
    worst = {kind: max(p.residual for p in report.points if p.kind == kind)
             for kind in ("forward", "inverse")}
    assert worst["forward"] < 1e-9
    assert worst["inverse"] < 1e-9


def test_round_trip_aggregates_failures():
    report = laplace.round_trip(
        "broken", lambda s: 1 / (s + 1), lambda t: 1.001 * math.exp(-t),
        t_grid=[1.0], s_grid=[1.0])
    assert not report.passed
    assert len(report.points) == 2


def test_relative_residual_floor():
    assert laplace.relative_residual(1e-320, 0.0) > 0
    assert laplace.relative_residual(2.0, 1.0) == 1.0
