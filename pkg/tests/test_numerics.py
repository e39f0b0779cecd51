"""Quadrature and incomplete-gamma kernels."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmwsec.numerics import (
    QuadratureError,
    QuadratureSpec,
    integrate_finite,
    integrate_semi_infinite,
    upper_incomplete_gamma,
)

TIGHT = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-280, max_subdivisions=4000)


def test_finite_linear():
    res = integrate_finite(lambda x: x, 0.0, 1.0)
    assert res.value == pytest.approx(0.5, rel=1e-12)
    assert res.abs_error_estimate >= 0
    assert res.subdivisions >= 1


def test_finite_sine():
    res = integrate_finite(np.sin, 0.0, math.pi)
    assert res.value == pytest.approx(2.0, rel=1e-10)


def test_finite_rejects_bad_limits():
    with pytest.raises(ValueError):
        integrate_finite(np.sin, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate_finite(np.sin, 0.0, math.inf)
    assert integrate_finite(np.sin, 2.0, 2.0).value == 0.0


def test_finite_rejects_nonfinite_integrand():
    with pytest.raises(ValueError, match="non-finite"):
        integrate_finite(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_finite_breakpoints_capture_jump():
    f = lambda x: np.where(x < 0.3, 1.0, 2.0)
    res = integrate_finite(f, 0.0, 1.0, breakpoints=[0.3])
    assert res.value == pytest.approx(0.3 + 1.4, rel=1e-12)


def test_budget_exhaustion_carries_best_estimate():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=4)
    with pytest.raises(QuadratureError) as err:
        integrate_finite(lambda x: np.sin(40.0 * x) ** 2, 0.0, math.pi, spec)
    best = err.value.best
    assert math.isfinite(best.value)
    assert best.abs_error_estimate > 0


def test_semi_infinite_exponential():
    res = integrate_semi_infinite(lambda x: np.exp(-x), 0.0)
    assert res.value == pytest.approx(1.0, rel=1e-10)


def test_semi_infinite_rational():
    res = integrate_semi_infinite(lambda x: 1.0 / (1.0 + x) ** 2, 0.0)
    assert res.value == pytest.approx(1.0, rel=1e-10)


def test_semi_infinite_product_kernel():
    # independent series oracle: log(2) = sum_k 1 / (k * 2^k)
    oracle = sum(1.0 / (k * 2.0 ** k) for k in range(1, 60))

    def f(z):
        z = np.asarray(z, dtype=float)
        safe = np.where(z > 0, z, 1.0)
        return np.where(z > 0, -np.expm1(-safe) * np.exp(-safe) / safe, 1.0)

    res = integrate_semi_infinite(f, 0.0, TIGHT)
    assert res.value == pytest.approx(oracle, rel=1e-10)


def test_semi_infinite_rejects_slow_decay():
    with pytest.raises(ValueError, match="decay"):
        integrate_semi_infinite(lambda x: 1.0 / (1.0 + x), 0.0)


@pytest.mark.parametrize("a", [1, 2, 3])
def test_semi_infinite_matches_complete_gamma(a):
    res = integrate_semi_infinite(lambda t: t ** (a - 1) * np.exp(-t), 0.0, TIGHT)
    assert res.value == pytest.approx(math.factorial(a - 1), rel=1e-10)


# --- honesty of the error estimates --------------------------------------

_STRESS = []
for k in range(6):
    _STRESS.append((lambda x, k=k: x ** k, 0.0, 2.0, 2.0 ** (k + 1) / (k + 1)))
for k in (1, 3, 7, 15, 40):
    _STRESS.append((lambda x, k=k: np.sin(k * x), 0.0, math.pi,
                    (1.0 - math.cos(k * math.pi)) / k))
for s in (0.5, 1.0, 2.0):
    _STRESS.append((lambda x, s=s: np.exp(-s * x), 0.0, 3.0,
                    (1.0 - math.exp(-3.0 * s)) / s))
_STRESS += [
    (lambda x: 1.0 / (1.0 + x ** 2), -3.0, 5.0,
     math.atan(5.0) + math.atan(3.0)),
    (lambda x: np.exp(-x ** 2), -2.0, 2.0, math.sqrt(math.pi) * math.erf(2.0)),
    (lambda x: np.log1p(x), 0.0, 1.0, 2.0 * math.log(2.0) - 1.0),
    (lambda x: np.sqrt(x), 0.0, 1.0, 2.0 / 3.0),
    (lambda x: 1.0 / np.sqrt(np.maximum(x, 1e-300)), 1e-12, 1.0,
     2.0 - 2e-6),
    (lambda x: np.cosh(x), -1.0, 1.0, 2.0 * math.sinh(1.0)),
    (lambda x: x * np.exp(-x), 0.0, 10.0, 1.0 - 11.0 * math.exp(-10.0)),
    (lambda x: np.abs(x - 0.5), 0.0, 1.0, 0.25),
    (lambda x: 1.0 / (2.0 + np.sin(5.0 * x)), 0.0, 2.0 * math.pi,
     2.0 * math.pi / math.sqrt(3.0)),
]
for p in (1.5, 2.5, 3.5):
    _STRESS.append((lambda x, p=p: (1.0 + x) ** (-p), 0.0, 9.0,
                    (1.0 - 10.0 ** (1.0 - p)) / (p - 1.0)))
for c in (0.25, 0.75):
    _STRESS.append((lambda x, c=c: np.where(x < c, 1.0, 3.0), 0.0, 1.0,
                    c + 3.0 * (1.0 - c)))
for w in (0.05, 0.2):
    _STRESS.append((lambda x, w=w: np.exp(-((x - 0.7) / w) ** 2), -1.0, 3.0,
                    w * math.sqrt(math.pi)))
for k in range(2, 14):
    _STRESS.append((lambda x, k=k: k * x ** (k - 1) + np.cos(x), 0.0, 1.0,
                    1.0 + math.sin(1.0)))
for k in (1, 2, 3, 4):
    _STRESS.append((lambda x, k=k: np.sin(k * x) ** 2, 0.0, math.pi,
                    math.pi / 2.0))
_STRESS += [
    (lambda x: 1.0 / (1.0 + x), 0.0, 1.0, math.log(2.0)),
    (lambda x: x * np.exp(x), 0.0, 2.0, math.exp(2.0) + 1.0),
    (lambda x: np.exp(np.cos(x)), 0.0, 2.0 * math.pi,
     2.0 * math.pi * float(__import__("scipy.special", fromlist=["i0"]).i0(1.0))),
    (lambda x: x * np.log(np.maximum(x, 1e-300)), 1e-12, 1.0, -0.25),
]
assert len(_STRESS) >= 50


@pytest.mark.parametrize("f,a,b,truth", _STRESS)
def test_error_estimates_honest(f, a, b, truth):
    res = integrate_finite(f, a, b, QuadratureSpec(1e-10, 1e-12, 4000))
    true_err = abs(res.value - truth)
    # allow the float representation noise of the reference value itself
    assert true_err <= 10.0 * res.abs_error_estimate + 4e-15 * (1.0 + abs(truth))


# --- upper incomplete gamma ------------------------------------------------

@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_gamma_order_one_closed_form(x):
    assert upper_incomplete_gamma(1.0, x) == pytest.approx(math.exp(-x),
                                                           rel=1e-13)


def test_gamma_complete_limit():
    assert upper_incomplete_gamma(0.5, 1e-12) == pytest.approx(
        math.sqrt(math.pi), abs=1e-5)


def test_gamma_negative_integer_vs_quadrature_oracle():
    oracle = integrate_semi_infinite(lambda t: t ** -2.0 * np.exp(-t), 1.0,
                                     TIGHT).value
    assert upper_incomplete_gamma(-1.0, 1.0) == pytest.approx(oracle,
                                                              rel=1e-10)


def test_gamma_random_orders_vs_quadrature_oracle():
    rng = np.random.default_rng(20240817)
    for _ in range(300):
        a = rng.uniform(-4.0, 4.0)
        x = rng.uniform(0.02, 20.0)
        oracle = integrate_semi_infinite(
            lambda t: t ** (a - 1.0) * np.exp(-t), x, TIGHT).value
        assert upper_incomplete_gamma(a, x) == pytest.approx(oracle, rel=1e-10)


def test_gamma_strictly_decreasing_in_x():
    for a in (-3.3, -1.0, -0.4, 0.0, 0.7, 2.5):
        xs = np.linspace(0.05, 15.0, 40)
        vals = upper_incomplete_gamma(a, xs)
        assert np.all(np.diff(vals) < 0)


def test_gamma_rejects_nonpositive_x():
    with pytest.raises(ValueError):
        upper_incomplete_gamma(-1.0, 0.0)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(0.5, -1.0)


def test_gamma_array_input_matches_scalar():
    xs = np.array([0.05, 0.4, 0.6, 3.0, 18.0])
    vec = upper_incomplete_gamma(-1.7, xs)
    for x, v in zip(xs, vec):
        assert v == upper_incomplete_gamma(-1.7, float(x))


@settings(max_examples=80, deadline=None)
@given(a=st.floats(-4.0, 4.0), x=st.floats(1e-2, 20.0))
def test_gamma_recurrence_property(a, x):
    lhs = a * upper_incomplete_gamma(a, x) + math.exp(a * math.log(x) - x)
    rhs = upper_incomplete_gamma(a + 1.0, x)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-300)
