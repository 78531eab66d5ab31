"""Leading Weyl coefficient of the eigenvalue counting function.

    C_W = ω_{d-1} / (2π)^{d-1} · ∫_Γ (γ(x)² - 1)^{(d-1)/2} dS_x

where ω_{d-1} is the volume of the unit ball in R^{d-1}.  Closed forms
cover spheres with constant damping; parametrized surfaces (ellipsoids,
and ellipses for d = 2) use tensor-product Gauss-Legendre quadrature.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import NotCaseB, QuadratureNonconvergent, ValidationError
from .expr import Constant

MAX_DOUBLINGS = 12
MAX_NODES = 2**23  # surface rules beyond this many nodes are not attempted
MAX_POLAR = 2048  # Gauss-Legendre node generation is quadratic in the count


def unit_ball_volume(n):
    """Volume of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(radius, d):
    """(d-1)-dimensional measure of the sphere of radius ``radius`` in R^d."""
    return d * unit_ball_volume(d) * radius ** (d - 1)


def weyl_prefactor(d):
    return unit_ball_volume(d - 1) / (2 * math.pi) ** (d - 1)


def sphere_weyl_coefficient(radius, gamma, d=3):
    """Closed form for a sphere with constant damping; ``R²(γ²-1)`` when d = 3."""
    if not gamma > 1:
        raise NotCaseB(f"damping must exceed 1, got gamma={gamma}")
    return weyl_prefactor(d) * sphere_area(radius, d) * (gamma * gamma - 1.0) ** ((d - 1) / 2)


@dataclass(frozen=True)
class Sphere:
    radius: float = 1.0

    @property
    def geometry_id(self):
        return f"sphere(R={self.radius!r})"

    def axes(self, d):
        return (self.radius,) * d


@dataclass(frozen=True)
class Ellipsoid:
    axes_: tuple

    @property
    def geometry_id(self):
        return "ellipsoid(" + ",".join(repr(a) for a in self.axes_) + ")"

    def axes(self, d):
        if len(self.axes_) != d:
            raise ValidationError(f"ellipsoid in R^{d} needs {d} semi-axes, got {len(self.axes_)}")
        return tuple(self.axes_)


@dataclass(frozen=True)
class WeylCoefficient:
    C_W: float
    d: int
    geometry_id: str
    gamma_descriptor: str
    nodes: int = 0


def _surface_rule(axes, n):
    """Nodes (3, M) and area weights (M,) on an ellipsoid, ``n`` polar nodes."""
    a, b, c = axes
    t, wt = roots_legendre(n)
    p, wp = roots_legendre(2 * n)
    theta = 0.5 * math.pi * (t + 1.0)
    phi = math.pi * (p + 1.0)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    st, ct, sp, cp = np.sin(th), np.cos(th), np.sin(ph), np.cos(ph)
    pts = np.stack([a * st * cp, b * st * sp, c * ct])
    d_th = np.stack([a * ct * cp, b * ct * sp, -c * st])
    d_ph = np.stack([-a * st * sp, b * st * cp, np.zeros_like(st)])
    area = np.linalg.norm(np.cross(d_th, d_ph, axis=0), axis=0)
    w = np.outer(wt, wp) * (0.5 * math.pi) * math.pi * area
    return pts.reshape(3, -1), w.ravel()


def _curve_rule(axes, n):
    a, b = axes
    p, wp = roots_legendre(2 * n)
    phi = math.pi * (p + 1.0)
    pts = np.stack([a * np.cos(phi), b * np.sin(phi), np.zeros_like(phi)])
    speed = np.hypot(a * np.sin(phi), b * np.cos(phi))
    return pts, wp * math.pi * speed


def surface_integral(func, axes, d, n):
    rule = _surface_rule if d == 3 else _curve_rule
    pts, w = rule(axes, n)
    return float(np.dot(w, func(pts)))


def weyl_coefficient(geometry, damping, d=3, rtol=1e-8, n0=8, method="auto"):
    """Weyl coefficient for ``geometry`` with damping descriptor ``damping``.

    A sphere with constant damping uses the closed form.  Otherwise the
    number of polar nodes doubles from ``n0`` until successive quadratures
    agree to ``rtol``, for at most ``MAX_DOUBLINGS`` doublings,
    ``MAX_POLAR`` polar nodes and ``MAX_NODES`` nodes in total.
    ``method="quadrature"`` skips the closed form.
    """
    if d not in (2, 3):
        raise ValidationError(f"dimension must be 2 or 3, got {d}")
    if method == "auto" and isinstance(geometry, Sphere) and isinstance(damping, Constant):
        return WeylCoefficient(
            C_W=sphere_weyl_coefficient(geometry.radius, damping.gamma, d),
            d=d,
            geometry_id=geometry.geometry_id,
            gamma_descriptor=str(damping),
        )
    axes = geometry.axes(d)
    if min(axes) <= 0:
        raise ValidationError(f"semi-axes must be positive, got {axes}")
    power = (d - 1) / 2

    def integrand(pts):
        g = np.asarray(damping(pts[0], pts[1], pts[2]), dtype=float)
        if np.any(~(g > 1.0)):
            bad = int(np.argmin(g))
            raise NotCaseB(
                f"damping {g.ravel()[bad]!r} <= 1 at node {tuple(pts[:, bad])}"
            )
        return (g * g - 1.0) ** power

    n = n0
    prev = surface_integral(integrand, axes, d, n)
    for _ in range(MAX_DOUBLINGS):
        n *= 2
        if n > MAX_POLAR or (2 * n * n if d == 3 else 2 * n) > MAX_NODES:
            break
        cur = surface_integral(integrand, axes, d, n)
        if abs(cur - prev) <= rtol * abs(cur):
            return WeylCoefficient(
                C_W=weyl_prefactor(d) * cur,
                d=d,
                geometry_id=geometry.geometry_id,
                gamma_descriptor=str(damping),
                nodes=n,
            )
        prev = cur
    raise QuadratureNonconvergent(
        f"no convergence to rtol={rtol} within the node budget"
    )
