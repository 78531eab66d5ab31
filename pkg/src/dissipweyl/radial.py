"""Exterior radial Dirichlet-to-Neumann values for balls.

For the exterior of a ball the outgoing solution of ``(Δ - κ²) u = 0``
separates into spherical harmonics times the decaying modified Bessel
function.  Only its logarithmic derivative

    D_l(x) = -k_l'(x) / k_l(x),        x = κ R,

enters the boundary condition, so normalizations never appear.  In three
dimensions ``k_l(x) ∝ exp(-x) θ_l(x) / x^(l+1)`` where ``θ_l`` is the
reverse Bessel polynomial with positive integer coefficients.  In two
dimensions ``K_m`` plays the role of ``k_l``.

The normal points into the exterior, so the per-mode value is ``+D_l``
and is always larger than 1.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegreeTooLarge, NonPositiveArgument, ValidationError

L_MAX = 2048

_EULER_GAMMA = 0.57721566490153286061


def multiplicity(l, d=3):
    """Number of independent spherical harmonics of degree ``l`` on S^(d-1)."""
    if l < 0:
        raise ValidationError(f"degree must be nonnegative, got {l}")
    if d == 3:
        return 2 * l + 1
    if d == 2:
        return 1 if l == 0 else 2
    raise ValidationError(f"dimension must be 2 or 3, got {d}")


@dataclass(frozen=True)
class BesselPolynomial:
    """Reverse Bessel polynomial θ_l.

    ``coeffs[j]`` multiplies ``x**(l - j)``, so the leading coefficient
    comes first.
    """

    l: int
    coeffs: tuple

    def __call__(self, x):
        acc = 0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def derivative(self):
        """Coefficients of θ_l' in the same highest-first layout."""
        l = self.l
        return tuple(c * (l - j) for j, c in enumerate(self.coeffs[:-1]))

    def log_derivative(self, x):
        """θ_l'(x)/θ_l(x) computed in exact rational arithmetic."""
        xf = Fraction(x)
        num = 0
        for c in self.derivative():
            num = num * xf + c
        return num / self(xf)


@lru_cache(maxsize=256)
def bessel_poly(l, l_max=L_MAX):
    """Exact integer coefficients of θ_l.

    The coefficient of ``x**(l-j)`` is ``(l+j)! / (j! (l-j)! 2**j)``.
    """
    if l < 0:
        raise ValidationError(f"degree must be nonnegative, got {l}")
    if l > l_max:
        raise DegreeTooLarge(f"degree {l} exceeds l_max={l_max}")
    coeffs = []
    for j in range(l + 1):
        num = math.factorial(l + j)
        den = math.factorial(j) * math.factorial(l - j) * 2**j
        q, r = divmod(num, den)
        assert r == 0
        coeffs.append(q)
    return BesselPolynomial(l, tuple(coeffs))


def _check_x(x):
    if not x > 0:
        raise NonPositiveArgument(f"argument must be positive, got {x}")


def log_derivative(l, x):
    """D_l(x) = -k_l'(x)/k_l(x) by the upward ratio recurrence.

    With ``ρ_l = k_{l+1}/k_l`` one has ``ρ_0 = 1 + 1/x`` and
    ``ρ_l = (2l+1)/x + 1/ρ_{l-1}``; then ``D_l = 1/ρ_{l-1} + (l+1)/x``
    with ``1/ρ_{-1} = 1``.  Every term is positive so rounding errors are
    damped rather than amplified.
    """
    _check_x(x)
    if l < 0:
        raise ValidationError(f"degree must be nonnegative, got {l}")
    inv = 1.0 / x
    prev = 1.0  # 1/ρ_{-1}
    for k in range(l):
        rho = (2 * k + 1) * inv + prev
        prev = 1.0 / rho
    return prev + (l + 1) * inv


def log_derivative_poly(l, x):
    """D_l through the Bessel polynomial, ``1 + (l+1)/x - θ_l'(x)/θ_l(x)``.

    Evaluated exactly in rationals and rounded once; slow but independent
    of the ratio recurrence.
    """
    _check_x(x)
    xf = Fraction(x)
    val = 1 + (l + 1) / xf - bessel_poly(l).log_derivative(xf)
    return float(val)


def log_derivative_table(l_max, x):
    """Array ``[D_0(x), ..., D_{l_max}(x)]`` in a single recurrence pass."""
    _check_x(x)
    out = np.empty(l_max + 1)
    inv = 1.0 / x
    prev = 1.0
    for k in range(l_max + 1):
        out[k] = prev + (k + 1) * inv
        prev = 1.0 / ((2 * k + 1) * inv + prev)
    return out


def _k1_over_k0(x):
    """K_1(x)/K_0(x) for x > 0."""
    if x <= 2.0:
        t = 0.25 * x * x
        lg = math.log(0.5 * x)
        i0 = s0 = 0.0
        i1 = s1 = 0.0
        term0 = 1.0  # t^k / (k!)^2
        term1 = 1.0  # t^k / (k! (k+1)!)
        harm = 0.0
        for k in range(60):
            if k > 0:
                harm += 1.0 / k
                term0 *= t / (k * k)
                term1 *= t / (k * (k + 1))
            psi1 = -_EULER_GAMMA + harm
            psi2 = psi1 + 1.0 / (k + 1)
            i0 += term0
            s0 += psi1 * term0
            i1 += term1
            s1 += (psi1 + psi2) * term1
            if term0 < 1e-18 * i0:
                break
        k0 = -lg * i0 + s0
        k1 = 1.0 / x + lg * 0.5 * x * i1 - 0.25 * x * s1
        return k1 / k0
    # Steed's continued fraction for order zero
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    a = -0.25
    for i in range(2, 10000):
        a -= 2 * (i - 1)
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        if abs(delh) < 1e-17 * abs(h):
            break
    h *= 0.25
    return (x + 0.5 - h) / x


def log_derivative_2d(m, x):
    """-K_m'(x)/K_m(x), the two-dimensional per-mode exterior value."""
    _check_x(x)
    if m < 0:
        raise ValidationError(f"degree must be nonnegative, got {m}")
    inv = 1.0 / x
    r = _k1_over_k0(x)  # K_1/K_0
    if m == 0:
        return r
    prev = 1.0 / r  # K_0/K_1
    for k in range(1, m):
        r = 2 * k * inv + 1.0 / r
        prev = 1.0 / r
    return prev + m * inv


def mode_dtn(l, x, d=3):
    """Per-mode exterior Dirichlet-to-Neumann value in dimension ``d``."""
    if d == 3:
        return log_derivative(l, x)
    if d == 2:
        return log_derivative_2d(l, x)
    raise ValidationError(f"dimension must be 2 or 3, got {d}")


def mode_dtn_table(l_max, x, d=3):
    """``[mode_dtn(l, x, d) for l in range(l_max + 1)]`` in one pass."""
    if d == 3:
        return log_derivative_table(l_max, x)
    if d != 2:
        raise ValidationError(f"dimension must be 2 or 3, got {d}")
    _check_x(x)
    out = np.empty(l_max + 1)
    inv = 1.0 / x
    r = _k1_over_k0(x)
    out[0] = r
    for k in range(1, l_max + 1):
        out[k] = 1.0 / r + k * inv
        r = 2 * k * inv + 1.0 / r
    return out
