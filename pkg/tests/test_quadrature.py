import math

import numpy as np
import pytest

from qwdirac.exceptions import ConvergenceError, DomainError
from qwdirac.quadrature import (
    IntegrationResult,
    IntegrationSpec,
    Method,
    ball_volume,
    integrate_1d,
    integrate_ball,
    integrate_ellipse,
    monomial,
    sphere_area,
    tanh_sinh_rule,
)

ADAPTIVE = IntegrationSpec(tolerance=1e-12, method=Method.ADAPTIVE)
DE = IntegrationSpec(tolerance=1e-12, method=Method.DOUBLE_EXPONENTIAL)
GL = IntegrationSpec(tolerance=1e-12, method=Method.TENSOR)

# integrand, interval, exact value, spec
HONESTY_SUITE = [
    (lambda x: x ** 2, (0.0, 1.0), 1.0 / 3.0, ADAPTIVE),
    (np.exp, (0.0, 1.0), math.e - 1.0, ADAPTIVE),
    (np.sin, (0.0, math.pi), 2.0, ADAPTIVE),
    (lambda x: 1.0 / (1.0 + x ** 2), (0.0, 1.0), math.pi / 4.0, ADAPTIVE),
    (lambda x: np.cos(x) ** 2, (0.0, 2.0 * math.pi), math.pi, ADAPTIVE),
    (np.log, (0.0, 1.0), -1.0, DE),
    (lambda x: 1.0 / np.sqrt(x), (0.0, 1.0), 2.0, DE),
    (lambda x: np.sqrt((1.0 - x) * (1.0 + x)), (-1.0, 1.0), math.pi / 2.0, DE),
    (lambda x: 1.0 / np.sqrt(x * (2.0 - x)), (0.0, 1.0), math.pi / 2.0, DE),
    (lambda x: x * np.log(x), (0.0, 1.0), -0.25, DE),
    (lambda x: np.exp(-x ** 2), (-10.0, 10.0), math.sqrt(math.pi), ADAPTIVE),
    (lambda x: 1.0 / (1.0 + 25.0 * x ** 2), (-1.0, 1.0), 0.4 * math.atan(5.0), GL),
    (lambda x: x ** 5, (-1.0, 2.0), 10.5, GL),
    (np.cosh, (0.0, 1.0), math.sinh(1.0), GL),
    (lambda x: 1.0 / x, (1.0, math.e), 1.0, ADAPTIVE),
    (np.sqrt, (0.0, 1.0), 2.0 / 3.0, DE),
    (np.log1p, (0.0, 1.0), 2.0 * math.log(2.0) - 1.0, ADAPTIVE),
    (lambda x: x / (1.0 + x), (0.0, 1.0), 1.0 - math.log(2.0), ADAPTIVE),
    (lambda x: x ** -0.25, (0.0, 1.0), 4.0 / 3.0, DE),
    (lambda x: np.exp(-x), (0.0, 50.0), 1.0 - math.exp(-50.0), ADAPTIVE),
]


def test_error_estimates_are_honest():
    """The true error stays within 3x the reported error on at least 19 of 20 integrands"""
    honest = 0
    for f, (a, b), exact, spec in HONESTY_SUITE:
        result = integrate_1d(f, a, b, spec)
        if abs(result.value - exact) <= 3.0 * result.error:
            honest += 1
    assert honest >= 19


@pytest.mark.parametrize("f, interval, exact, spec", HONESTY_SUITE)
def test_suite_values(f, interval, exact, spec):
    result = integrate_1d(f, *interval, spec)
    assert result.value == pytest.approx(exact, abs=1e-9)


def test_refinement_never_increases_error():
    """Halving the tolerance never makes the true error larger"""
    for f, (a, b), exact, spec in [HONESTY_SUITE[6], HONESTY_SUITE[9], HONESTY_SUITE[11]]:
        errors = []
        tolerance = 1e-2
        while tolerance > 1e-10:
            result = integrate_1d(f, a, b, IntegrationSpec(tolerance=tolerance, method=spec.method))
            errors.append(abs(result.value - exact))
            tolerance /= 2.0
        for coarse, fine in zip(errors, errors[1:]):
            assert fine <= coarse + 1e-14


def test_double_exponential_never_touches_endpoints():
    seen = []

    def f(x):
        seen.append(np.asarray(x))
        return np.ones_like(x)

    integrate_1d(f, -1.0, 1.0, DE)
    nodes = np.concatenate(seen)
    assert np.all(nodes > -1.0) and np.all(nodes < 1.0)


def test_tanh_sinh_rule():
    x, w = tanh_sinh_rule(0.0, 2.0, 5)
    assert np.all((x > 0.0) & (x < 2.0))
    assert np.sum(w) == pytest.approx(2.0, abs=1e-12)


def test_interval_and_method_validation():
    with pytest.raises(DomainError):
        integrate_1d(np.sin, 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate_1d(np.sin, 0.0, 1.0, IntegrationSpec(method=Method.MONTE_CARLO))
    with pytest.raises(DomainError):
        IntegrationSpec(tolerance=0.0)
    assert IntegrationSpec(method="tensor").method is Method.TENSOR


def test_result_arithmetic():
    total = IntegrationResult(1.0, 0.25, 10, True) + IntegrationResult(2.0, 0.5, 5, False)
    assert total == IntegrationResult(3.0, 0.75, 15, False)
    assert IntegrationResult(2.0, 1e-3, 4, True).scaled(-0.5) == IntegrationResult(-1.0, 5e-4, 4, True)


def test_checked_result():
    good = IntegrationResult(1.0, 1e-12, 8, True)
    assert good.checked("ok", strict=True) is good
    bad = IntegrationResult(0.5, 0.1, 8, False)
    assert bad.checked("loose") is bad
    with pytest.raises(ConvergenceError) as excinfo:
        bad.checked("loose", strict=True)
    assert excinfo.value.estimate == 0.5
    assert excinfo.value.error == 0.1


def test_monomial():
    v = np.array([[2.0, 3.0], [-1.0, 0.5]])
    np.testing.assert_allclose(monomial(v, (0, 0)), [1.0, 1.0])
    np.testing.assert_allclose(monomial(v, (2, 1)), [12.0, 0.5])


def test_ball_and_sphere_constants():
    assert ball_volume(1) == pytest.approx(2.0)
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(3, 2.0) == pytest.approx(32.0 * math.pi / 3.0)
    assert ball_volume(4) == pytest.approx(math.pi ** 2 / 2.0)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_ball_volume_by_product_rule(d):
    result = integrate_ball(lambda x: np.ones(len(x)), d, 1.5)
    assert result.converged
    assert result.value == pytest.approx(ball_volume(d, 1.5), rel=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_ball_second_moment(d):
    """Integral of x_1^2 over the unit ball is vol / (d + 2)"""
    spec = IntegrationSpec(method=Method.TENSOR)
    result = integrate_ball(lambda x: x[:, 0] ** 2, d, 1.0, spec)
    assert result.value == pytest.approx(ball_volume(d) / (d + 2), rel=1e-10)


@pytest.mark.parametrize("d", [2, 3])
def test_odd_integrands_vanish(d):
    result = integrate_ball(lambda x: x[:, 0] ** 3 * (1.0 + x[:, -1] ** 2), d, 1.0)
    assert abs(result.value) <= max(result.error, 1e-14)


def test_monte_carlo_in_four_dimensions():
    spec = IntegrationSpec(tolerance=1e-3, samples=100_000)
    exact = ball_volume(4) / 6.0
    result = integrate_ball(lambda x: x[:, 0] ** 2, 4, 1.0, spec)
    assert result.error > 0
    assert abs(result.value - exact) <= 5.0 * result.error
    odd = integrate_ball(lambda x: x[:, 1], 4, 1.0, spec)
    assert abs(odd.value) <= 5.0 * odd.error


def test_monte_carlo_is_reproducible():
    spec = IntegrationSpec(tolerance=1e-2, samples=20_000, method=Method.MONTE_CARLO, seed=7)
    f = lambda x: np.exp(-np.sum(x ** 2, axis=1))
    first = integrate_ball(f, 3, 1.0, spec)
    second = integrate_ball(f, 3, 1.0, spec)
    other = integrate_ball(f, 3, 1.0, IntegrationSpec(tolerance=1e-2, samples=20_000, method=Method.MONTE_CARLO, seed=8))
    assert first.value == second.value
    assert first.error == second.error
    assert first.value != other.value


def test_ball_validation():
    with pytest.raises(DomainError):
        integrate_ball(lambda x: np.ones(len(x)), 5, 1.0)
    with pytest.raises(DomainError):
        integrate_ball(lambda x: np.ones(len(x)), 2, 0.0)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
def test_ellipse_area(p):
    result = integrate_ellipse(lambda v: np.ones(len(v)), p)
    assert result.value == pytest.approx(math.pi * math.sqrt(p * (1.0 - p)), rel=1e-9)
    disk = integrate_ellipse(lambda v: np.ones(len(v)), p, IntegrationSpec(method=Method.SPHERICAL_PRODUCT))
    assert disk.value == pytest.approx(result.value, rel=1e-10)


def test_ellipse_points_stay_inside():
    p = 0.3

    def f(v):
        assert np.all(v[:, 0] ** 2 / p + v[:, 1] ** 2 / (1.0 - p) <= 1.0 + 1e-12)
        return v[:, 0]

    result = integrate_ellipse(f, p)
    assert abs(result.value) < 1e-10
    with pytest.raises(DomainError):
        integrate_ellipse(f, 1.0)
