from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy import special

from dissipweyl.errors import DegreeTooLarge, NonPositiveArgument
from dissipweyl.radial import (
    bessel_poly,
    log_derivative,
    log_derivative_2d,
    log_derivative_poly,
    log_derivative_table,
    mode_dtn,
    mode_dtn_table,
    multiplicity,
)


def mp_log_derivative(l, x):
    """-k_l'/k_l from mpmath with k_l(x) = sqrt(pi/(2x)) K_{l+1/2}(x)."""
    mpmath.mp.dps = 40
    f = lambda t: mpmath.log(mpmath.besselk(l + 0.5, t) / mpmath.sqrt(t))
    return float(-mpmath.diff(f, x))


def test_multiplicity():
    assert [multiplicity(l, 3) for l in range(4)] == [1, 3, 5, 7]
    assert [multiplicity(l, 2) for l in range(4)] == [1, 2, 2, 2]


def test_bessel_poly_small():
    assert bessel_poly(0).coeffs == (1,)
    assert bessel_poly(1).coeffs == (1, 1)
    assert bessel_poly(2).coeffs == (1, 3, 3)
    assert bessel_poly(3).coeffs == (1, 6, 15, 15)


def _polymul_x2(c):
    return tuple(c) + (0, 0)


def _polyadd(a, b):
    n = max(len(a), len(b))
    a = (0,) * (n - len(a)) + tuple(a)
    b = (0,) * (n - len(b)) + tuple(b)
    return tuple(x + y for x, y in zip(a, b))


@pytest.mark.parametrize("l", [1, 2, 5, 17, 60, 150])
def test_bessel_poly_recurrence(l):
    # θ_{l+1} = (2l+1) θ_l + x² θ_{l-1}, in exact integers
    lhs = bessel_poly(l + 1).coeffs
    rhs = _polyadd(tuple((2 * l + 1) * c for c in bessel_poly(l).coeffs),
                   _polymul_x2(bessel_poly(l - 1).coeffs))
    assert lhs == rhs
    assert lhs[0] == 1 and all(c > 0 for c in lhs)


def test_bessel_poly_too_large():
    with pytest.raises(DegreeTooLarge):
        bessel_poly(11, l_max=10)


def test_log_derivative_closed_forms():
    assert_allclose(log_derivative(0, 2.0), 1.5, rtol=1e-15)
    assert_allclose(log_derivative(1, 2.0), 5 / 3, rtol=1e-15)
    v = log_derivative(5, 1000.0)
    assert 1.0 < v < 1.01


def test_log_derivative_rejects_nonpositive():
    with pytest.raises(NonPositiveArgument):
        log_derivative(0, 0.0)
    with pytest.raises(NonPositiveArgument):
        log_derivative(3, -1.0)


@pytest.mark.parametrize("l", [0, 1, 2, 7, 30, 120])
@pytest.mark.parametrize("x", [0.05, 1.0, 13.0, 400.0])
def test_log_derivative_vs_mpmath(l, x):
    assert_allclose(log_derivative(l, x), mp_log_derivative(l, x), rtol=1e-13)


def test_two_evaluation_paths_agree():
    for l in list(range(0, 201, 7)) + [200]:
        for x in (0.1, 1.0, 10.0, 100.0):
            assert_allclose(log_derivative(l, x), log_derivative_poly(l, x), rtol=1e-11)


def test_poly_path_is_exact_for_l1():
    # 1 + 2/x - 1/(x+1) at x = 3 is 17/12
    assert log_derivative_poly(1, 3.0) == float(Fraction(17, 12))


def test_table_matches_scalar():
    x = 2.7
    table = log_derivative_table(40, x)
    assert_allclose(table, [log_derivative(l, x) for l in range(41)], rtol=1e-15)
    assert_allclose(mode_dtn_table(10, x, d=2), [log_derivative_2d(m, x) for m in range(11)],
                    rtol=1e-14)


def test_monotone_in_x_and_interlacing():
    xs = np.geomspace(0.01, 1e3, 60)
    for l in range(0, 51, 5):
        vals = np.array([log_derivative(l, x) for x in xs])
        assert np.all(np.diff(vals) < 0)
        assert np.all(vals > 1)
        nxt = np.array([log_derivative(l + 1, x) for x in xs])
        assert np.all(nxt > vals)


@settings(max_examples=200, deadline=None)
@given(l=st.integers(0, 300), x=st.floats(1e-3, 1e4))
def test_log_derivative_bounds(l, x):
    # D_l decreases from +inf to 1 and dominates (l+1)/x
    v = log_derivative(l, x)
    assert v > 1
    assert v >= (l + 1) / x


# two dimensions --------------------------------------------------------------


@pytest.mark.parametrize("m", [0, 1, 2, 5, 20])
@pytest.mark.parametrize("x", [0.01, 0.5, 1.0, 2.0, 2.5, 9.0, 150.0])
def test_2d_vs_scipy(m, x):
    ref = -special.kvp(m, x) / special.kv(m, x)
    assert_allclose(log_derivative_2d(m, x), ref, rtol=1e-10)


def test_2d_series_oracle_at_one():
    # twenty-term power series for K_0 and K_0' at x = 1
    mpmath.mp.dps = 30
    x = mpmath.mpf(1)
    t = x * x / 4
    k0 = mpmath.mpf(0)
    dk0 = mpmath.mpf(0)
    H = mpmath.mpf(0)
    lg = mpmath.log(x / 2) + mpmath.euler
    for k in range(20):
        if k:
            H += mpmath.mpf(1) / k
        c = t**k / mpmath.factorial(k) ** 2
        k0 += -lg * c + H * c
        # derivative of each term in x
        dc = 2 * k * c / x
        dk0 += -lg * dc - c / x + H * dc
    assert_allclose(log_derivative_2d(0, 1.0), float(-dk0 / k0), rtol=1e-10)


def test_2d_asymptote_and_ordering():
    x = 1e4
    assert_allclose(log_derivative_2d(0, x), 1 + 1 / (2 * x), rtol=0, atol=1e-8)
    for x in np.geomspace(0.01, 100, 40):
        assert log_derivative_2d(1, x) > log_derivative_2d(0, x)
    assert mode_dtn(3, 1.5, d=2) == log_derivative_2d(3, 1.5)
