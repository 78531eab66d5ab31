"""Eigenvalue branches of ``P(h) = T(h, -1) - γ`` on the real axis.

For the ball the self-adjoint operator ``P(h)`` is diagonal in spherical
harmonics, and the branch of degree ``l`` is

    μ_l(h) = D_l(R/h) - γ,

an increasing function of ``h`` running from ``1 - γ < 0`` (as h -> 0) to
``+∞``.  Its unique zero ``h_k`` is the reciprocal of the modulus of the
eigenvalue of degree ``l``, and counting negative branches at ``h = 1/r``
reproduces the eigenvalue counting function.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .ball import eigenvalue_for_degree
from .errors import EmptyWindow, NoCrossing, NonPositiveScale, NumericalError
from .radial import mode_dtn, mode_dtn_table, multiplicity
from .weyl import sphere_weyl_coefficient

H0_DEFAULT = 0.2
_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class BranchSample:
    l: int
    h: float
    mu: float
    dmu_dh: float

    @property
    def h_dmu_dh(self):
        return self.h * self.dmu_dh


@dataclass(frozen=True)
class MonotonicityConstants:
    c0: float
    c1: float
    C: float
    epsilon: float
    delta: float

    @classmethod
    def from_bounds(cls, c0, c1=None):
        """Constants for damping with ``min γ = c0`` and ``max γ = c1``."""
        c1 = c0 if c1 is None else c1
        C = 2.0 / c1**2
        return cls(
            c0=c0,
            c1=c1,
            C=C,
            epsilon=C * (c0 - 1.0) ** 2,
            delta=(c0 - 1.0) / (2.0 * math.sqrt(2.0)),
        )

    @property
    def lower_bound(self):
        """The lower bound ``3ε/4`` on ``h dμ/dh`` inside the window."""
        return 0.75 * self.epsilon


@dataclass(frozen=True)
class BranchZero:
    l: int
    h_k: float
    lambda_mapped: float
    multiplicity: int
    mu_at_zero: float


@dataclass(frozen=True)
class AuditResult:
    l: int
    n_samples: int
    window_min: float
    empirical_max: float
    bound: float

    @property
    def passed(self):
        return self.window_min >= self.bound


@dataclass(frozen=True)
class NegativeCount:
    count: int
    predicted: float
    h: float


def _mu_value(l, h, cfg):
    return mode_dtn(l, cfg.radius / h, cfg.dim) - cfg.gamma


def mu(l, h, cfg):
    """Branch value and central-difference derivative at scale ``h``."""
    if not h > 0:
        raise NonPositiveScale(f"semiclassical scale must be positive, got {h}")
    step = max(1e-6 * h, 1e-9)
    step = min(step, 0.5 * h)
    val = _mu_value(l, h, cfg)
    deriv = (_mu_value(l, h + step, cfg) - _mu_value(l, h - step, cfg)) / (2 * step)
    return BranchSample(l=l, h=h, mu=val, dmu_dh=deriv)


def zero_crossing(l, cfg, h_max, check=True):
    """Locate the unique ``h_k`` in ``(0, h_max]`` with ``μ_l(h_k) = 0``.

    Solves in the ``h`` variable, independently of the eigenvalue solver in
    the ``x = R/h`` variable; with ``check`` the two are compared.
    """
    if not h_max > 0:
        raise NonPositiveScale(f"h_max must be positive, got {h_max}")
    if _mu_value(l, h_max, cfg) <= 0:
        raise NoCrossing(f"branch l={l} stays negative on (0, {h_max}]")
    lo = h_max
    # μ_l -> 1 - γ < 0 as h -> 0
    for _ in range(200):
        lo *= 0.5
        if _mu_value(l, lo, cfg) < 0:
            break
    else:
        raise NumericalError(f"could not bracket the zero of branch l={l}")
    h_k = brentq(lambda h: _mu_value(l, h, cfg), lo, min(2 * lo, h_max),
                 xtol=1e-300, rtol=_RTOL, maxiter=500)
    zero = BranchZero(
        l=l,
        h_k=h_k,
        lambda_mapped=-1.0 / h_k,
        multiplicity=multiplicity(l, cfg.dim),
        mu_at_zero=_mu_value(l, h_k, cfg),
    )
    if check:
        lam = eigenvalue_for_degree(cfg, l).lam
        if abs(zero.lambda_mapped - lam) > 1e-10 * max(1.0, abs(lam)):
            raise NumericalError(
                f"branch zero {zero.lambda_mapped!r} disagrees with eigenvalue {lam!r}"
            )
    return zero


def sign_changes(l, cfg, h_max, n=1000, h_min=None):
    """Number of sign changes of ``μ_l`` on a log-spaced grid in ``(0, h_max]``."""
    if h_min is None:
        h_min = min(1e-3 * h_max, cfg.radius * (cfg.gamma - 1.0) / (8.0 * (l + 1)))
    hs = np.geomspace(h_min, h_max, n)
    signs = np.sign([_mu_value(l, h, cfg) for h in hs])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _window(l, cfg, delta, h0):
    """Interval of ``h <= h0`` where ``|μ_l(h)| <= δ``, or None."""

    def f(h, level):
        return _mu_value(l, h, cfg) - level

    try:
        hk = zero_crossing(l, cfg, h_max=2.0 * cfg.radius * cfg.gamma, check=False).h_k
    except NoCrossing:
        return None
    lo = hk
    while f(lo, -delta) > 0:
        lo *= 0.5
    h_lo = brentq(f, lo, hk, args=(-delta,), rtol=_RTOL)
    hi = hk
    while f(hi, delta) < 0:
        hi *= 2.0
    h_hi = brentq(f, hk, hi, args=(delta,), rtol=_RTOL)
    if h_lo > h0:
        return None
    return h_lo, min(h_hi, h0)


def branch_samples(l, cfg, h_lo, h_hi, n):
    return [mu(l, h, cfg) for h in np.linspace(h_lo, h_hi, n)]


def monotonicity_audit(l, cfg, samples=64, h0=H0_DEFAULT, constants=None):
    """Smallest ``h dμ_l/dh`` over the window ``|μ_l| <= δ``, ``h <= h0``.

    ``samples`` is either a sample count, spread uniformly over the window,
    or an explicit iterable of ``h`` values that is filtered to the window.
    """
    if constants is None:
        constants = MonotonicityConstants.from_bounds(cfg.gamma)
    delta = constants.delta
    if isinstance(samples, int):
        win = _window(l, cfg, delta, h0)
        pts = [] if win is None else branch_samples(l, cfg, win[0], win[1], samples)
    else:
        pts = [mu(l, h, cfg) for h in samples if h <= h0]
    pts = [s for s in pts if abs(s.mu) <= delta * (1 + 1e-12)]
    if not pts:
        raise EmptyWindow(f"no sample of branch l={l} lies in |mu| <= {delta:.6g}, h <= {h0}")
    vals = [s.h_dmu_dh for s in pts]
    return AuditResult(
        l=l,
        n_samples=len(pts),
        window_min=float(min(vals)),
        empirical_max=float(max(vals)),
        bound=constants.lower_bound,
    )


def negative_count(cfg, h):
    """Multiplicity-weighted number of negative branches of ``P(h)``.

    Branches increase with ``l`` at fixed ``h``, so the negative ones form
    an initial segment ``0..L``.  Also returns the phase-volume prediction
    ``C_W h^(1-d)``.
    """
    if not h > 0:
        raise NonPositiveScale(f"semiclassical scale must be positive, got {h}")
    x = cfg.radius / h
    size = 64
    while True:
        table = mode_dtn_table(size, x, cfg.dim) - cfg.gamma
        pos = np.flatnonzero(table >= 0)
        if pos.size:
            top = int(pos[0])
            break
        size *= 2
    count = sum(multiplicity(l, cfg.dim) for l in range(top))
    c_w = sphere_weyl_coefficient(cfg.radius, cfg.gamma, cfg.dim)
    return NegativeCount(count=count, predicted=c_w * h ** (1 - cfg.dim), h=h)
