"""Eikonal and transport recursions on a general boundary chart.

In normal geodesic coordinates ``(x1, x')`` near the boundary the model
operator is

    -h² (∂₁² + q ∂₁ + Σ R_{mj} ∂_m ∂_j) - z,
    R(x) = Σ_k x1^k R_k(x'),   q(x) = Σ_k x1^k q_k(x'),

where ``R_0`` is the inverse metric of the boundary.  The phase
``φ = Σ x1^k φ_k(x', ξ')`` starts from ``φ_0 = -<x', ξ'>`` and
``φ_1 = ρ = sqrt(z - r_0)`` with ``Im ρ > 0``.  Solving for ``φ_{K+1}``
needs tangential derivatives of the lower ``φ_k``; every coefficient is
therefore carried as a truncated Taylor jet in ``x'`` about the query
point, which differentiates the recursion itself.

The tangential cutoff is taken identically 1 near the query point, so
``a_{0,0} = 1`` and ``a_{0,j} = 0`` for ``j >= 1``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import taylor
from .errors import DegenerateGrid, OracleDepthExceeded, ValidationError, VanishingRho
from .taylor import Jet
from .wkb import elliptic_root, slope_above_floor

COLLAR_FRACTION = 0.3


# charts ---------------------------------------------------------------------


class Chart:
    """Metric data of a boundary collar chart.

    Subclasses implement :meth:`R` and :meth:`q` against :class:`Jet`
    coordinates; any function built from jet arithmetic supplies derivatives
    of every order.  ``max_order`` caps the derivative depth a chart can
    deliver (None means unlimited).
    """

    n = 2
    max_order = None
    x_independent = False

    def R(self, k, X):
        raise NotImplementedError

    def q(self, k, X):
        raise NotImplementedError


def _zero(X):
    return taylor.constant(0.0, X[0])


class FlatChart(Chart):
    """Half-space collar: ``R = I``, ``q = 0``."""

    x_independent = True

    def __init__(self, n=2):
        self.n = n

    def R(self, k, X):
        val = 1.0 if k == 0 else 0.0
        return [[taylor.constant(val if i == j else 0.0, X[0]) for j in range(self.n)]
                for i in range(self.n)]

    def q(self, k, X):
        return _zero(X)


class BallCollarChart(Chart):
    """Collar of a ball of radius ``radius`` with the tangential metric frozen.

    ``R_k = (-1)^k (k+1) R^{-k} R^{-2} I`` and ``q_k = (d-1)(-1)^k R^{-(k+1)}``:
    the radial coefficients of a sphere of radius ``R`` with the angular
    metric replaced by a constant one, so nothing depends on ``x'``.
    """

    x_independent = True

    def __init__(self, radius=1.0, d=3):
        self.radius = radius
        self.d = d
        self.n = d - 1

    def R(self, k, X):
        val = (-1) ** k * (k + 1) / self.radius ** (k + 2)
        return [[taylor.constant(val if i == j else 0.0, X[0]) for j in range(self.n)]
                for i in range(self.n)]

    def q(self, k, X):
        return taylor.constant((self.d - 1) * (-1) ** k / self.radius ** (k + 1), X[0])

    def covector_for_sigma(self, sigma):
        """Covector with ``r_0 = sigma``."""
        xi = np.zeros(self.n)
        xi[0] = self.radius * math.sqrt(sigma)
        return xi


class SphereChart(Chart):
    """Exterior collar of the sphere of radius ``radius`` in polar angles.

    ``x' = (θ, ϕ)`` are the polar and azimuthal angles about the axis
    ``rotation @ e_3``; ``R(x) = diag(1, 1/sin²θ) / (R + x1)²`` and
    ``q = 2/(R + x1)``.
    """

    n = 2

    def __init__(self, radius=1.0, rotation=None):
        self.radius = radius
        self.rotation = np.eye(3) if rotation is None else np.asarray(rotation, float)

    def R(self, k, X):
        theta = X[0]
        scale = (-1) ** k * (k + 1) / self.radius ** (k + 2)
        s = taylor.sin(theta)
        return [[taylor.constant(scale, theta), _zero(X)],
                [_zero(X), scale / (s * s)]]

    def q(self, k, X):
        return taylor.constant(2.0 * (-1) ** k / self.radius ** (k + 1), X[0])

    def embedding(self, X):
        """Cartesian position of the boundary point with angles ``X``."""
        theta, phi = X
        st = taylor.sin(theta)
        local = [self.radius * st * taylor.cos(phi), self.radius * st * taylor.sin(phi),
                 self.radius * taylor.cos(theta)]
        Q = self.rotation
        return [sum(Q[i, j] * local[j] for j in range(3)) for i in range(3)]

    def angles_of(self, p):
        """Chart coordinates of the Cartesian boundary point ``p``."""
        local = self.rotation.T @ np.asarray(p, float)
        theta = math.acos(max(-1.0, min(1.0, local[2] / self.radius)))
        phi = math.atan2(local[1], local[0])
        return np.array([theta, phi])


CHARTS = {
    "flat": FlatChart,
    "ballcollar": BallCollarChart,
    "sphere": SphereChart,
}


def induced_inverse_metric(chart, point):
    """Inverse of the metric pulled back by ``chart.embedding`` at ``point``."""
    X = taylor.variables(point, 1)
    emb = chart.embedding(X)
    J = np.array([[e.partial(tuple(int(i == m) for i in range(chart.n))).real
                   for m in range(chart.n)] for e in emb])
    return np.linalg.inv(J.T @ J), J


def r0_value(chart, point, covector):
    X = taylor.variables(point, 0)
    R0 = chart.R(0, X)
    xi = np.asarray(covector, float)
    return sum(R0[i][j].value.real * xi[i] * xi[j] for i in range(chart.n) for j in range(chart.n))


def transfer_covector(chart_from, chart_to, point_from, covector_from):
    """Point and covector in ``chart_to`` representing the same cotangent vector."""
    X = taylor.variables(point_from, 0)
    p = [e.value.real for e in chart_from.embedding(X)]
    point_to = chart_to.angles_of(p)
    _, J_from = induced_inverse_metric(chart_from, point_from)
    _, J_to = induced_inverse_metric(chart_to, point_to)
    # ∂x_from/∂x_to through the common tangent plane
    dfrom_dto = np.linalg.pinv(J_from) @ J_to
    return point_to, dfrom_dto.T @ np.asarray(covector_from, float)


# engine ---------------------------------------------------------------------


@dataclass
class GeneralSymbolJet:
    point: tuple
    covector: tuple
    z: complex
    N: int
    D: int
    rho: Jet
    phi: list  # phi[k] = φ_k as a jet in x'
    amp: dict = field(default_factory=dict)  # (k, j) -> jet of a_{k,j}
    R_jets: list = field(default_factory=list)
    q_jets: list = field(default_factory=list)

    def phi_values(self):
        return [p.value for p in self.phi]

    def amp_values(self):
        return {key: a.value for key, a in self.amp.items()}

    def boundary_symbol(self, h, N=None):
        N = self.N if N is None else N
        return -1j * self.rho.value - sum(h ** (j + 1) * self.amp[(1, j)].value for j in range(N))


def _pair(Rl, u, v):
    """``<R_l u, v> = Σ (R_l)_{mj} u_m v_j`` for gradient lists."""
    n = len(u)
    acc = 0 * u[0]
    for m in range(n):
        for j in range(n):
            if not Rl[m][j].c.any():
                continue
            t = Rl[m][j] * (u[m] * v[j])
            acc = t if acc is None else acc + t
    return acc


def _second_order(Rl, hess):
    n = len(hess)
    acc = 0 * hess[0][0]
    for m in range(n):
        for j in range(n):
            if not Rl[m][j].c.any():
                continue
            t = Rl[m][j] * hess[m][j]
            acc = t if acc is None else acc + t
    return acc


class _Tower:
    """Cached gradients and Hessians of jets."""

    def __init__(self):
        self._grad = {}
        self._hess = {}

    def grad(self, key, jet):
        if key not in self._grad:
            self._grad[key] = jet.grad()
        return self._grad[key]

    def hess(self, key, jet):
        if key not in self._hess:
            g = self.grad(key, jet)
            self._hess[key] = [[gi.deriv(j) for j in range(len(g))] for gi in g]
        return self._hess[key]


def _setup(chart, point, covector, N, degree):
    n = chart.n
    point = tuple(float(p) for p in point)
    covector = tuple(float(c) for c in covector)
    if len(point) != n or len(covector) != n:
        raise ValidationError(f"chart has {n} tangential coordinates")
    D = 2 * N + 2 if degree is None else degree
    if chart.max_order is not None and chart.max_order < D:
        raise OracleDepthExceeded(
            f"chart supplies derivatives to order {chart.max_order}, recursion needs {D}"
        )
    X = taylor.variables(point, D)
    R_jets = [chart.R(k, X) for k in range(N + 2)]
    q_jets = [chart.q(k, X) for k in range(N + 2)]
    phi0 = None
    for i in range(n):
        t = X[i] * (-covector[i])
        phi0 = t if phi0 is None else phi0 + t
    return point, covector, D, X, R_jets, q_jets, phi0


def eikonal_general(chart, point, covector, z=-1.0, N=4, degree=None):
    """Phase tower ``φ_0, ..., φ_{N+1}`` at ``(point, covector)``."""
    point, covector, D, X, R_jets, q_jets, phi0 = _setup(chart, point, covector, N, degree)
    n = chart.n
    tower = _Tower()
    xi_grad = [taylor.constant(-c, X[0]) for c in covector]
    tower._grad[0] = xi_grad
    r0 = _pair(R_jets[0], xi_grad, xi_grad)
    rho0 = elliptic_root(z, r0.value.real if abs(r0.value.imag) == 0 else r0.value)
    rho = taylor.sqrt(complex(z) - r0, root=rho0)
    if abs(rho.value) < 1e-12:
        raise VanishingRho("rho vanishes at the query point")
    phi = [phi0, rho]
    inv2rho = rho.reciprocal()
    for K in range(1, N + 1):
        rest = None
        for k in range(1, K):
            t = phi[k + 1] * phi[K - k + 1] * ((k + 1) * (K - k + 1))
            rest = t if rest is None else rest + t
        for ell in range(K + 1):
            for k in range(K - ell + 1):
                j = K - ell - k
                t = _pair(R_jets[ell], tower.grad(k, phi[k]), tower.grad(j, phi[j]))
                rest = t if rest is None else rest + t
        phi.append(rest * inv2rho * (-1.0 / (2 * (K + 1))))
    sym = GeneralSymbolJet(point, covector, complex(z), N, D, rho, phi,
                           R_jets=R_jets, q_jets=q_jets)
    sym._tower = tower
    return sym


def _phi_laplace(sym, tower, k):
    """Collar coefficient ``φ_k^Δ``."""
    phi, R, q = sym.phi, sym.R_jets, sym.q_jets
    acc = phi[k + 2] * ((k + 1) * (k + 2))
    for ell in range(k + 1):
        nu = k - ell
        if nu > 0:
            acc = acc + _second_order(R[ell], tower.hess(nu, phi[nu]))
        acc = acc + q[ell] * phi[nu + 1] * (nu + 1)
    return acc


def _amp_laplace(sym, tower, amp, k, j):
    """Collar coefficient ``a_{k,j}^Δ``."""
    R, q = sym.R_jets, sym.q_jets
    zero = taylor.constant(0.0, sym.rho)
    get = lambda kk: amp.get((kk, j), zero)
    acc = get(k + 2) * ((k + 1) * (k + 2))
    for ell in range(k + 1):
        nu = k - ell
        a_nu = get(nu)
        acc = acc + _second_order(R[ell], tower.hess(("a", nu, j), a_nu))
        acc = acc + q[ell] * get(nu + 1) * (nu + 1)
    return acc


def _transport_terms(sym, tower, amp, k, j, skip_unknown):
    """Order-(k, j) transport identity; optionally omit the ``a_{k+1,j}`` term."""
    phi, R = sym.phi, sym.R_jets
    zero = taylor.constant(0.0, sym.rho)
    get = lambda kk: amp.get((kk, j), zero)
    acc = zero
    for k1 in range(k + 1):
        k2 = k - k1
        if not (skip_unknown and k1 == 0):
            acc = acc + phi[k1 + 1] * get(k2 + 1) * (2j * (k1 + 1) * (k2 + 1))
        acc = acc + tower.phi_lap[k1] * get(k2) * 1j
    for k1 in range(k + 1):
        for k2 in range(k - k1 + 1):
            k3 = k - k1 - k2
            if (k3, j) not in amp:
                continue
            acc = acc + _pair(R[k1], tower.grad(k2, phi[k2]),
                              tower.grad(("a", k3, j), amp[(k3, j)])) * 2j
    if j > 0:
        acc = acc + _amp_laplace(sym, tower, amp, k, j - 1)
    return acc


def transport_general(sym):
    """Fill ``sym.amp`` with ``a_{k,j}`` jets for ``k + j <= N``."""
    N = sym.N
    tower = sym._tower
    tower.phi_lap = [_phi_laplace(sym, tower, k) for k in range(N)]
    amp = {(0, 0): taylor.constant(1.0, sym.rho)}
    for j in range(1, N):
        amp[(0, j)] = taylor.constant(0.0, sym.rho)
    inv_rho = sym.rho.reciprocal()
    for j in range(N):
        for k in range(N - j):
            rest = _transport_terms(sym, tower, amp, k, j, skip_unknown=True)
            amp[(k + 1, j)] = rest * inv_rho * (-1.0 / (2j * (k + 1)))
    sym.amp = amp
    return amp


def general_symbol(chart, point, covector, z=-1.0, N=4, degree=None):
    sym = eikonal_general(chart, point, covector, z, N, degree)
    transport_general(sym)
    return sym


def eikonal_residuals(sym):
    """Relative value at the query point of each eikonal identity ``K = 0..N``."""
    tower = sym._tower
    out = []
    for K in range(sym.N + 1):
        terms = [sym.phi[k + 1] * sym.phi[K - k + 1] * ((k + 1) * (K - k + 1)) for k in range(K + 1)]
        for ell in range(K + 1):
            for k in range(K - ell + 1):
                j = K - ell - k
                terms.append(_pair(sym.R_jets[ell], tower.grad(k, sym.phi[k]),
                                   tower.grad(j, sym.phi[j])))
        vals = [t.value for t in terms]
        if K == 0:
            vals.append(-sym.z)
        scale = sum(abs(v) for v in vals) or 1.0
        out.append(abs(sum(vals)) / scale)
    return out


def transport_residuals(sym):
    """Relative value at the query point of every transport identity used."""
    tower = sym._tower
    out = {}
    for j in range(sym.N):
        for k in range(sym.N - j):
            full = _transport_terms(sym, tower, sym.amp, k, j, skip_unknown=False)
            unknown = sym.phi[1] * sym.amp[(k + 1, j)] * (2j * (k + 1))
            scale = abs(unknown.value) + abs((full - unknown).value) or 1.0
            out[(k, j)] = abs(full.value) / scale
    return out


# collar residuals -----------------------------------------------------------


def _unit(n, m):
    return tuple(int(i == m) for i in range(n))


def _unit2(n, a, b):
    alpha = [0] * n
    alpha[a] += 1
    alpha[b] += 1
    return tuple(alpha)


def pde_residuals(sym, x1):
    """Eikonal and order-zero transport residuals along the normal at the point.

    The phase is truncated at ``x1^N`` for the eikonal and at ``x1^(N+1)``
    for the transport equation, the amplitude at ``x1^N``, and ``R``, ``q``
    at the matching orders; both residuals are then ``O(x1^N)``.
    Returns ``(eikonal, transport, eikonal_scale, transport_scale)`` arrays.
    """
    N, n = sym.N, len(sym.point)
    x = np.asarray(x1, float)
    val = lambda jet: jet.value
    grad = lambda jet: np.array([jet.partial(_unit(n, m)) for m in range(n)])
    hess = lambda jet: np.array([[jet.partial(_unit2(n, a, b)) for b in range(n)] for a in range(n)])
    Rv = [np.array([[e.value for e in row] for row in Rl]) for Rl in sym.R_jets]
    qv = [qj.value for qj in sym.q_jets]
    phi = sym.phi
    pv = [val(p) for p in phi]
    pg = [grad(p) for p in phi]
    ph = [hess(p) for p in phi]
    a0 = [sym.amp[(k, 0)] for k in range(N + 1)]
    av = [val(a) for a in a0]
    ag = [grad(a) for a in a0]

    def series(coeffs, top, deriv=0):
        out = 0
        for k in range(deriv, top + 1):
            out = out + coeffs[k] * math.perm(k, deriv) * x[..., None, None] ** (k - deriv) \
                if np.ndim(coeffs[k]) == 2 else out + coeffs[k] * math.perm(k, deriv) * \
                (x[..., None] ** (k - deriv) if np.ndim(coeffs[k]) == 1 else x ** (k - deriv))
        return out

    # eikonal: φ to order N, R to order N-1
    d1 = series(pv, N, 1)
    gphi = series(pg, N)
    Rx = series(Rv, N - 1)
    quad = np.einsum("...m,...mj,...j->...", gphi, Rx, gphi)
    eik = d1 * d1 + quad - sym.z
    eik_scale = np.abs(d1 * d1) + np.abs(quad) + abs(sym.z)

    # transport j = 0: φ to N+1, a to N, R and q to N
    d1 = series(pv, N + 1, 1)
    d2 = series(pv, N + 1, 2)
    gphi = series(pg, N + 1)
    hphi = series(ph, N + 1)
    Rx = series(Rv, N)
    qx = series(qv, N)
    a = series(av, N)
    da = series(av, N, 1)
    ga = series(ag, N)
    t1 = 2j * d1 * da
    t2 = 2j * np.einsum("...m,...mj,...j->...", gphi, Rx, ga)
    lap = d2 + qx * d1 + np.einsum("...mj,...mj->...", Rx, hphi)
    t3 = 1j * lap * a
    tr = t1 + t2 + t3
    tr_scale = np.abs(t1) + np.abs(t2) + np.abs(t3)
    return eik, tr, eik_scale, tr_scale


def pde_residual_order(chart, point, covector, z=-1.0, N=4, x1_grid=None):
    """Log-log slopes of the eikonal and transport collar residuals.

    The default grid is log-spaced in ``(0, 0.3 R]`` for charts with a
    radius, ``(0, 0.3]`` otherwise.  An identically vanishing residual has
    slope ``inf``.
    """
    if x1_grid is None:
        width = COLLAR_FRACTION * getattr(chart, "radius", 1.0)
        x1_grid = np.geomspace(width / 16, width, 12)
    x1_grid = np.asarray(x1_grid, float)
    if x1_grid.size < 4 or np.any(x1_grid <= 0):
        raise DegenerateGrid("need at least 4 positive collar points")
    sym = general_symbol(chart, point, covector, z, N)
    eik, tr, es, ts = pde_residuals(sym, x1_grid)
    return slope_above_floor(x1_grid, np.abs(eik), es), slope_above_floor(x1_grid, np.abs(tr), ts)
