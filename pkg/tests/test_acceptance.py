"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict with its wall time; the lines are
printed as the test runs and repeated in the terminal summary.
"""

import functools
import math
import time

import numpy as np
from numpy.testing import assert_allclose

from dissipweyl import wkb
from dissipweyl.ball import ProblemConfig, counting_function, eigenvalue_for_degree, spectrum_up_to
from dissipweyl.branches import (
    MonotonicityConstants,
    monotonicity_audit,
    negative_count,
    sign_changes,
    zero_crossing,
)
from dissipweyl.errors import EmptyWindow
from dissipweyl.expr import Constant
from dissipweyl.report import build_report, probe_radii
from dissipweyl.symbol_jets import BallCollarChart, SphereChart, general_symbol, pde_residual_order
from dissipweyl.weyl import Ellipsoid, Sphere, weyl_coefficient

RESULTS = {}


def criterion(number, title, budget):
    """Time the check, enforce its runtime budget and record a verdict line."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper():
            start = time.perf_counter()
            try:
                detail = fn()
            except BaseException as exc:
                elapsed = time.perf_counter() - start
                msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
                _record(number, False, title, elapsed, budget, msg)
                raise
            elapsed = time.perf_counter() - start
            ok = elapsed < budget
            _record(number, ok, title, elapsed, budget, detail or "")
            assert ok, f"runtime {elapsed:.2f}s exceeds {budget}s"

        return wrapper

    return deco


def _record(number, ok, title, elapsed, budget, detail):
    line = (f"criterion {number}: {'PASS' if ok else 'FAIL'} {title} "
            f"({elapsed:.2f}s of {budget}s) {detail}").rstrip()
    RESULTS[number] = line
    print(line)


@criterion(1, "spectral gap", 1.0)
def test_criterion_1_spectral_gap():
    for gamma in (1.5, 2.0, 4.0):
        cfg = ProblemConfig(dim=3, radius=1.0, gamma=gamma, r_max=40.0)
        recs = spectrum_up_to(cfg)
        top = max(recs, key=lambda r: r.lam)
        assert abs(top.lam - (-1.0 / (gamma - 1.0))) <= 1e-12
        assert top.degree == 0 and top.multiplicity == 1
        assert all(r.lam <= top.lam for r in recs)
        assert sum(r.lam == top.lam for r in recs) == 1
    return "gamma in {1.5, 2, 4}"


@criterion(2, "closed-form roots", 1.0)
def test_criterion_2_closed_form_roots():
    cfg = ProblemConfig(gamma=2.0)
    # D_0(x) = 2  <=>  x - 1 = 0;  D_1(x) = 2  <=>  x^2 - 2 = 0
    x0 = max(np.roots([1.0, -1.0]).real)
    x1 = max(np.roots([1.0, 0.0, -2.0]).real)
    lam0 = eigenvalue_for_degree(cfg, 0).lam
    lam1 = eigenvalue_for_degree(cfg, 1).lam
    assert abs(lam0 - (-x0)) <= 1e-12 and abs(lam0 + 1.0) <= 1e-12
    assert abs(lam1 - (-x1)) <= 1e-12 and abs(lam1 + math.sqrt(2.0)) <= 1e-12
    return f"errors {abs(lam0 + 1):.1e}, {abs(lam1 + math.sqrt(2)):.1e}"


@criterion(3, "Weyl law at desk scale", 10.0)
def test_criterion_3_weyl_law():
    rep = build_report(ProblemConfig(dim=3, radius=1.0, gamma=2.0, r_max=200.0), rmin=20.0)
    assert max(r.degree for r in rep.records) >= 340
    assert rep.sup_ratio < 20
    assert rep.fitted_exponent <= 1.3
    return f"sup_ratio={rep.sup_ratio:.3f} exponent={rep.fitted_exponent:.3f}"


@criterion(4, "counting reduction", 5.0)
def test_criterion_4_counting_reduction():
    cfg = ProblemConfig(dim=3, radius=1.0, gamma=2.0, r_max=200.0)
    curve = counting_function(spectrum_up_to(cfg))
    radii = probe_radii(curve, 20.0, 200.0, 20)
    jumps = np.array([b[0] for b in curve.breakpoints])
    assert len(set(radii)) == 20
    assert all(np.min(np.abs(jumps - r)) > 1e-6 for r in radii)
    for r in radii:
        assert negative_count(cfg, 1.0 / r).count == curve(r)
    return "20/20 probes match"


@criterion(5, "zero-eigenvalue correspondence", 5.0)
def test_criterion_5_zero_correspondence():
    cfg = ProblemConfig(dim=3, radius=1.0, gamma=2.0)
    worst = 0.0
    for l in range(101):
        z = zero_crossing(l, cfg, 2.0, check=False)
        worst = max(worst, abs(-1.0 / z.h_k - eigenvalue_for_degree(cfg, l).lam))
        assert sign_changes(l, cfg, 2.0, n=1000) == 1
    assert worst <= 1e-10
    return f"max deviation {worst:.1e}"


@criterion(6, "monotonicity bound", 5.0)
def test_criterion_6_monotonicity():
    parts = []
    for gamma in (1.5, 2.0, 4.0):
        cfg = ProblemConfig(gamma=gamma)
        consts = MonotonicityConstants.from_bounds(gamma)
        assert_allclose(consts.lower_bound, 0.75 * 2 * (gamma - 1) ** 2 / gamma**2, rtol=1e-15)
        worst, audited = math.inf, 0
        for l in range(101):
            try:
                res = monotonicity_audit(l, cfg, samples=64, h0=0.2, constants=consts)
            except EmptyWindow:
                continue  # the window lies entirely above h0
            audited += 1
            worst = min(worst, res.window_min)
        assert audited >= 80
        assert worst >= consts.lower_bound
        parts.append(f"{gamma}: {worst:.3f}>={consts.lower_bound:.3f}")
    return "; ".join(parts)


@criterion(7, "parametrix order checks", 10.0)
def test_criterion_7_parametrix():
    for sigma in (0.0, 0.5, 1.0, 3.0, 10.0):
        for d in (2, 3):
            for N in (1, 2, 4, 8):
                jet = wkb.radial_jet(sigma, 1.0, d, N)
                phi = wkb.eikonal_coeffs(jet)
                amp = wkb.transport_coeffs(jet, phi)
                assert max(wkb.eikonal_residuals(jet, phi)) <= 1e-12
                assert max(wkb.transport_residuals(jet, phi, amp).values()) <= 1e-12
                for h in (1e-3, 1e-2, 0.1, 0.5):
                    tau = wkb.boundary_symbol(jet, h).value
                    assert abs(tau.imag) <= 1e-10 * abs(tau)
    flat = wkb.radial_jet(0.0, 1.0, 3, 1)
    for h in np.geomspace(1e-3, 1.0, 9):
        assert abs(wkb.boundary_symbol(flat, h).value - (1 + h)) <= 1e-15 * (1 + h)
    grid = np.geomspace(1e-3, 1e-1, 16)
    slopes = [wkb.error_scaling_test(1.0, N, grid).slope for N in (1, 2, 3)]
    for N, s in zip((1, 2, 3), slopes):
        assert s >= N + 0.5
    return "slopes " + ", ".join(f"{s:.2f}" for s in slopes)


@criterion(8, "general jet engine", 10.0)
def test_criterion_8_jet_engine():
    worst = 0.0
    for sigma in (0.0, 0.5, 1.0, 3.0, 10.0):
        for d in (2, 3):
            chart = BallCollarChart(1.0, d)
            g = general_symbol(chart, (0.3,) * (d - 1), chart.covector_for_sigma(sigma), -1.0, 4)
            r = wkb.symbol_jet(wkb.radial_jet(sigma, 1.0, d, 4))
            for k in range(1, 6):
                worst = max(worst, abs(g.phi[k].value - r.phi[k]))
            for key, val in r.amp.items():
                worst = max(worst, abs(g.amp[key].value - val))
    assert worst <= 1e-12
    eik, _ = pde_residual_order(SphereChart(1.0), (1.1, 0.3), (0.0, 0.8), -1.0, 4)
    assert eik >= 3.5
    return f"max deviation {worst:.1e}, sphere eikonal slope {eik:.2f}"


@criterion(9, "Weyl coefficient", 2.0)
def test_criterion_9_weyl_coefficient():
    for R, gamma in ((1.0, 2.0), (0.5, 1.5), (2.0, 4.0)):
        closed = weyl_coefficient(Sphere(R), Constant(gamma)).C_W
        quad = weyl_coefficient(Sphere(R), Constant(gamma), method="quadrature").C_W
        assert_allclose(closed, R * R * (gamma * gamma - 1), rtol=1e-14)
        assert abs(quad - closed) <= 1e-8 * closed
    ell = weyl_coefficient(Ellipsoid((1.0, 1.0, 1.0)), Constant(2.0)).C_W
    assert abs(ell - 3.0) <= 1e-8 * 3.0
    nc = negative_count(ProblemConfig(dim=3, radius=1.0, gamma=2.0), 0.1)
    assert_allclose(nc.predicted, 300.0, rtol=1e-14)
    assert abs(nc.count - 300) <= 0.15 * 300
    return f"kappa0=300, exact count {nc.count}"
