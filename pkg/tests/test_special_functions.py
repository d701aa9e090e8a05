import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riesz_bounds.special_functions import (
    ConvergenceError, beta, bessel_j, bessel_zero, bessel_zeros, gamma, lgamma, lt, lt_constant,
    unit_ball_volume,
)

# mpmath (30 digits) values frozen here
J01 = 2.40482555769577276862
J11 = 3.83170597020751231561


def test_gamma_examples():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(5) == 24.0
    assert gamma(2.5) == pytest.approx(1.32934038817913702047, rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_rejects_nonpositive(x):
    with pytest.raises(ValueError):
        gamma(x)


def test_gamma_matches_stdlib_to_1e13():
    xs = np.concatenate([np.linspace(0.01, 2, 300), np.linspace(2, 170, 500)])
    worst = max(abs(gamma(x) / math.gamma(x) - 1) for x in xs)
    assert worst <= 1e-13


@given(st.floats(min_value=0.1, max_value=20))
def test_gamma_recursion(x):
    assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-12)


def test_lgamma_and_beta():
    for x in (0.3, 1.7, 12.5, 200.0):
        assert lgamma(x) == pytest.approx(math.lgamma(x), rel=1e-12, abs=1e-13)
    assert beta(2, 3) == pytest.approx(1 / 12, rel=1e-14)
    assert beta(100, 80) == pytest.approx(math.exp(math.lgamma(100) + math.lgamma(80) - math.lgamma(180)), rel=1e-11)


def test_lt_constant_examples():
    assert lt_constant(1.5, 1).value == pytest.approx(3 / 16, rel=1e-12)
    assert lt(1, 1) == pytest.approx(2 / (3 * math.pi), rel=1e-12)
    assert lt(1, 2) == pytest.approx(1 / (8 * math.pi), rel=1e-12)
    c = lt_constant(1.5, 2)
    assert float(c) == c.value and c.dim == 2 and c.sigma == 1.5


@pytest.mark.parametrize("sigma", [1, 1.5, 2, 2.5, 3])
@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_lt_product_identity(sigma, d):
    assert lt(sigma, d - 1) * lt(sigma + (d - 1) / 2, 1) == pytest.approx(lt(sigma, d), rel=1e-10)


@given(st.floats(min_value=0, max_value=10), st.integers(min_value=1, max_value=8))
def test_lt_constant_definition(sigma, d):
    direct = math.gamma(sigma + 1) / ((4 * math.pi) ** (d / 2) * math.gamma(sigma + 1 + d / 2))
    assert lt(sigma, d) == pytest.approx(direct, rel=1e-12)


def test_lt_constant_rejects_bad_input():
    with pytest.raises(ValueError):
        lt_constant(-0.1, 2)
    with pytest.raises(ValueError):
        lt_constant(1, 0)


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_bessel_examples():
    assert abs(bessel_j(0.5, math.pi)) < 1e-15
    assert bessel_j(0, 0) == 1.0
    assert abs(bessel_j(0, 2.4048255577)) < 1e-10


def test_bessel_half_integer_closed_form():
    x = np.linspace(0, 100, 2001)
    exact = np.sqrt(2 / (np.pi * np.maximum(x, 1e-300))) * np.sin(x)
    exact[0] = 0.0
    assert np.max(np.abs(bessel_j(0.5, x) - exact)) <= 1e-12


def test_bessel_against_scipy():
    # scipy.special is used only as an independent oracle here
    from scipy.special import jv
    x = np.linspace(0, 100, 1501)
    for nu in (0, 0.5, 1, 2.5, 7, 20, 45):
        assert np.max(np.abs(bessel_j(nu, x) - jv(nu, x))) <= 1e-12


def test_bessel_scalar_and_array_agree():
    x = np.linspace(0, 60, 301)
    arr = bessel_j(3.3, x)
    assert np.max(np.abs(arr - np.array([bessel_j(3.3, float(v)) for v in x]))) <= 1e-14


def test_bessel_rejects_negative():
    with pytest.raises(ValueError):
        bessel_j(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0, -1.0)


def test_bessel_zero_examples():
    assert bessel_zero(0.5, 1) == pytest.approx(math.pi, abs=1e-10)
    assert bessel_zero(0.5, 3) == pytest.approx(3 * math.pi, abs=1e-10)
    assert bessel_zero(0, 1) == pytest.approx(J01, abs=1e-10)
    assert bessel_zero(1, 1) == pytest.approx(J11, abs=1e-10)


def test_bessel_zero_domain():
    with pytest.raises(ValueError):
        bessel_zero(51, 1)
    with pytest.raises(ValueError):
        bessel_zero(1, 0)


@pytest.mark.parametrize("nu", [0, 0.5, 1])
def test_bessel_zero_interlacing(nu):
    for k in range(1, 6):
        assert bessel_zero(nu, k) < bessel_zero(nu + 1, k) < bessel_zero(nu, k + 1)


def test_bessel_zeros_are_roots_and_increasing():
    from scipy.special import jn_zeros
    for m in (0, 3, 12, 40):
        z = bessel_zeros(m, count=25)
        assert np.all(np.diff(z) > 0)
        assert np.max(np.abs(z - jn_zeros(m, 25))) <= 1e-10


def test_bessel_zeros_below():
    z = bessel_zeros(0, below=10.0)
    assert len(z) == 3 and z[-1] < 10.0
    assert len(bessel_zeros(5, below=5.0)) == 0


def test_bessel_zeros_argument_check():
    with pytest.raises(ValueError):
        bessel_zeros(0)
    with pytest.raises(ValueError):
        bessel_zeros(0, count=2, below=3)


def test_convergence_error_is_runtime_error():
    assert issubclass(ConvergenceError, RuntimeError)
