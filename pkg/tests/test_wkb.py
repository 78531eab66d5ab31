import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from dissipweyl.errors import DegenerateGrid, ValidationError, VanishingRho
from dissipweyl.radial import mode_dtn
from dissipweyl.wkb import (
    boundary_symbol,
    eikonal_coeffs,
    eikonal_residuals,
    elliptic_root,
    error_scaling_test,
    mode_for_sigma,
    mode_sigma,
    mode_symbol,
    ode_residual_slopes,
    radial_jet,
    slope_above_floor,
    symbol_jet,
    transport_coeffs,
    transport_residuals,
)

H_GRID = np.geomspace(1e-3, 1e-1, 16)


def test_jet_coefficients():
    jet = radial_jet(2.0, R=1.5, d=3, N=3)
    assert jet.Lambda_k[0] == 2.0
    assert_allclose(jet.Lambda_k[1], -2 * 2.0 / 1.5, rtol=1e-15)
    assert_allclose(jet.q_k[0], 2 / 1.5, rtol=1e-15)
    with pytest.raises(ValidationError):
        radial_jet(1.0, N=0)


def test_root_branch():
    assert elliptic_root(-1.0, 3.0) == 2j
    rho = elliptic_root(-1.0 + 0.3j, 0.7)
    assert rho.imag > 0
    assert_allclose(rho**2 + 0.7 - (-1.0 + 0.3j), 0, atol=1e-15)
    with pytest.raises(VanishingRho):
        elliptic_root(1.0, 1.0)


def test_flat_channel():
    phi = eikonal_coeffs(radial_jet(0.0, N=3))
    assert phi[1] == 1j
    assert phi[2] == 0


def test_phi2_sigma3():
    phi = eikonal_coeffs(radial_jet(3.0, N=1))
    assert phi[1] == 2j
    assert_allclose(phi[2], -0.75j, atol=1e-16)


@pytest.mark.parametrize("sigma", [0.0, 0.5, 1.0, 3.0, 10.0])
@pytest.mark.parametrize("d", [2, 3])
def test_a10_closed_form(sigma, d):
    jet = radial_jet(sigma, R=1.3, d=d, N=2)
    sym = symbol_jet(jet)
    rho, phi2, q0 = sym.rho, sym.phi[2], jet.q_k[0]
    assert_allclose(sym.amp[(1, 0)], -(2 * phi2 + q0 * rho) / (2 * rho), rtol=1e-14)
    assert_allclose(sym.amp[(1, 0)], sigma / (2 * (1 + sigma) * 1.3) - (d - 1) / (2 * 1.3),
                    rtol=1e-13, atol=1e-15)


def test_a10_examples():
    assert_allclose(symbol_jet(radial_jet(0.0, N=1)).amp[(1, 0)], -1.0, rtol=1e-15)
    assert_allclose(symbol_jet(radial_jet(3.0, N=1)).amp[(1, 0)], -5 / 8, rtol=1e-15)


def test_amp_boundary_values():
    sym = symbol_jet(radial_jet(1.0, N=4))
    assert sym.amp[(0, 0)] == 1
    assert all(sym.amp[(0, j)] == 0 for j in range(1, 4))


def test_symbol_flat_channel_exact():
    jet = radial_jet(0.0, N=1)
    for h in (1e-3, 0.1, 0.5, 2.0):
        tau = boundary_symbol(jet, h).value
        assert_allclose(tau, 1 + h, rtol=1e-15)
        assert_allclose(tau.real, mode_dtn(0, 1 / h), rtol=1e-14)


def test_symbol_sigma3():
    jet = radial_jet(3.0, N=1)
    for h in (0.01, 0.2):
        assert_allclose(boundary_symbol(jet, h).value, 2 + 0.625 * h, rtol=1e-15)


def test_symbol_breakdown():
    jet = radial_jet(1.0, N=3)
    val = boundary_symbol(jet, 0.05)
    assert len(val.per_order_terms) == 4
    assert_allclose(sum(val.per_order_terms), val.value, rtol=1e-15)
    assert_allclose(val.per_order_terms[0], math.sqrt(2.0), rtol=1e-15)


@pytest.mark.parametrize("sigma", [0.0, 0.5, 1.0, 3.0, 10.0])
@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("N", [1, 4, 8])
def test_algebraic_residuals(sigma, d, N):
    jet = radial_jet(sigma, R=1.0, d=d, N=N)
    phi = eikonal_coeffs(jet)
    amp = transport_coeffs(jet, phi)
    assert max(eikonal_residuals(jet, phi)) <= 1e-12
    assert max(transport_residuals(jet, phi, amp).values()) <= 1e-12
    # reality at z = -1
    assert all(abs(p.real) <= 1e-14 * max(1.0, abs(p)) for p in phi[1:])
    assert all(abs(a.imag) <= 1e-12 * max(1.0, abs(a)) for a in amp.values())


@settings(max_examples=100, deadline=None)
@given(sigma=st.floats(0.0, 50.0), h=st.floats(1e-4, 1.0), N=st.integers(1, 6),
       d=st.sampled_from([2, 3]))
def test_symbol_real(sigma, h, N, d):
    tau = boundary_symbol(radial_jet(sigma, 1.0, d, N), h).value
    assert abs(tau.imag) <= 1e-10 * abs(tau)


def test_mode_sigma_roundtrip():
    assert mode_sigma(3, 0.1) == pytest.approx(0.12)
    assert mode_for_sigma(mode_sigma(40, 0.02), 0.02) == 40
    assert mode_for_sigma(mode_sigma(40, 0.02, d=2), 0.02, d=2) == 40


def test_mode_symbol_close_to_exact():
    for l, h in [(10, 0.05), (100, 0.01)]:
        tau = mode_symbol(l, h, 4).value.real
        assert abs(tau - mode_dtn(l, 1 / h)) < 1e-5


def test_error_scaling_slopes():
    slopes = {N: error_scaling_test(1.0, N, H_GRID).slope for N in (1, 2, 3)}
    for N, s in slopes.items():
        assert s >= N + 0.5
    assert slopes[3] > slopes[1]


def test_error_scaling_flat_channel_exact():
    fit = error_scaling_test(0.0, 1, H_GRID)
    assert math.isinf(fit.slope) and fit.exact
    assert all(s.l == 0 for s in fit.samples)


def test_error_scaling_degenerate_grid():
    with pytest.raises(DegenerateGrid):
        error_scaling_test(1.0, 1, [0.01, 0.02, 0.03])


def test_slope_above_floor():
    xs = np.geomspace(0.01, 1, 10)
    assert_allclose(slope_above_floor(xs, 3 * xs**2, 1.0), 2.0, rtol=1e-12)
    assert math.isinf(slope_above_floor(xs, np.zeros(10), 1.0))
    # points at the rounding floor are ignored
    ys = xs**3
    ys[:4] = 1e-18
    assert_allclose(slope_above_floor(xs, ys, 1.0), 3.0, rtol=1e-12)


@pytest.mark.parametrize("N", [1, 3, 6])
def test_ode_residual_orders(N):
    slopes = ode_residual_slopes(radial_jet(1.0, 1.0, 3, N), np.geomspace(0.02, 0.3, 12))
    assert len(slopes) == N + 1
    for p, s in enumerate(slopes):
        assert s >= N + 1 - p - 0.5
