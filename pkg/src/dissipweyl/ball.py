"""Exact point spectrum of the dissipative wave generator for a ball.

With constant damping ``gamma > 1`` on the sphere of radius ``R`` the
eigenfunction ansatz ``k_l(|λ| r) Y_l`` turns the boundary condition
``∂_ν f - λ γ f = 0`` into the scalar equation ``D_l(x) = γ`` with
``λ = -x/R``.  ``D_l`` decreases strictly from ``+∞`` to 1 on
``(0, ∞)``, so every degree contributes exactly one real eigenvalue with
the full harmonic multiplicity.
"""

import bisect
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketFailure, LmaxInsufficient, NoEigenvalue, NotCaseB, ValidationError
from .radial import L_MAX, mode_dtn, multiplicity

MAX_DOUBLINGS = 200
_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class ProblemConfig:
    dim: int = 3
    radius: float = 1.0
    gamma: float = 2.0
    l_max: int = L_MAX
    r_max: float = 50.0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValidationError(f"dimension must be 2 or 3, got {self.dim}")
        if not self.radius > 0:
            raise ValidationError(f"radius must be positive, got {self.radius}")
        if not self.gamma > 1:
            raise NotCaseB(f"damping must exceed 1, got gamma={self.gamma}")
        if not self.r_max > 0:
            raise ValidationError(f"r_max must be positive, got {self.r_max}")
        if self.l_max < 0:
            raise ValidationError(f"l_max must be nonnegative, got {self.l_max}")

    @property
    def gap(self):
        """Largest eigenvalue in three dimensions, ``-1/((γ-1) R)``."""
        return -1.0 / ((self.gamma - 1.0) * self.radius)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EigenvalueRecord:
    lam: float
    degree: int
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class CountingCurve:
    """Right-continuous step function ``N(r)`` given by its jumps."""

    breakpoints: tuple  # ((r, count), ...) with count = N(r) including r

    def __call__(self, r):
        radii = [b[0] for b in self.breakpoints]
        i = bisect.bisect_right(radii, r)
        return 0 if i == 0 else self.breakpoints[i - 1][1]

    def left_limit(self, r):
        radii = [b[0] for b in self.breakpoints]
        i = bisect.bisect_left(radii, r)
        return 0 if i == 0 else self.breakpoints[i - 1][1]


def mode_root(l, gamma, d=3):
    """Unique positive root of ``D_l(x) = γ``."""
    if not gamma > 1:
        raise NoEigenvalue(f"D_l > 1 >= gamma={gamma}: no root")

    def f(x):
        return mode_dtn(l, x, d) - gamma

    lo = (l + 1) / (gamma + 1)
    hi = 2.0 * (l + 1) / (gamma - 1)
    for _ in range(MAX_DOUBLINGS):
        if f(lo) > 0:
            break
        lo *= 0.5
    else:
        raise BracketFailure(f"no lower bracket for l={l}, gamma={gamma}")
    for _ in range(MAX_DOUBLINGS):
        if f(hi) < 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BracketFailure(f"no upper bracket for l={l}, gamma={gamma}")
    return brentq(f, lo, hi, xtol=1e-300, rtol=_RTOL, maxiter=500)


def eigenvalue_for_degree(cfg, l):
    x = mode_root(l, cfg.gamma, cfg.dim)
    residual = abs(mode_dtn(l, x, cfg.dim) - cfg.gamma)
    return EigenvalueRecord(
        lam=-x / cfg.radius,
        degree=l,
        multiplicity=multiplicity(l, cfg.dim),
        residual=residual,
    )


class NumericalOrderingError(BracketFailure):
    def __init__(self, l):
        super().__init__(f"mode roots are not increasing in the degree at l={l}")


def spectrum_up_to(cfg, margin=2):
    """All eigenvalues with ``|λ| <= cfg.r_max``, sorted by modulus.

    Degrees are swept upward until the root exceeds ``r_max R`` and then
    ``margin`` further degrees are checked.  Roots increase with the
    degree, so sorting by degree is sorting by modulus.
    """
    bound = cfg.r_max * cfg.radius
    records = []
    beyond = 0
    l = 0
    while True:
        if l > cfg.l_max:
            raise LmaxInsufficient(
                f"sweep reached l_max={cfg.l_max} before roots exceeded r_max*R={bound}"
            )
        rec = eigenvalue_for_degree(cfg, l)
        if -rec.lam * cfg.radius <= bound:
            if beyond:
                # degrees above a root beyond the bound must also be beyond it
                raise NumericalOrderingError(l)
            records.append(rec)
        else:
            beyond += 1
            if beyond > margin:
                break
        l += 1
    records.sort(key=lambda r: (-r.lam, r.degree))
    return records


def counting_function(records):
    """Multiplicity-weighted cumulative count by modulus."""
    pts = sorted((-r.lam, r.multiplicity) for r in records)
    out = []
    total = 0
    for r, m in pts:
        total += m
        if out and out[-1][0] == r:
            out[-1] = (r, total)
        else:
            out.append((r, total))
    return CountingCurve(tuple(out))


def scaled_gap_check(cfg, records, tol=1e-12):
    """True when the top eigenvalue equals ``-1/((γ-1)R)`` and sits at l=0."""
    if not records or cfg.dim != 3:
        return False
    top = max(records, key=lambda r: r.lam)
    return (
        math.isclose(top.lam, cfg.gap, rel_tol=0, abs_tol=tol)
        and top.degree == 0
        and top.multiplicity == 1
    )
