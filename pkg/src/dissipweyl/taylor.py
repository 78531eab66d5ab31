"""Truncated multivariate Taylor series (forward-mode jets).

A :class:`Jet` stores the Taylor coefficients of a function of ``n``
variables about a base point up to total degree ``D``.  Arithmetic and the
elementary functions propagate the expansion exactly up to rounding, so a
function written against jets yields all of its mixed partial derivatives
at the base point.  Each jet also records ``valid``, the total degree up to
which its coefficients are trustworthy; differentiation lowers it by one.
"""

import math
from functools import lru_cache

import numpy as np

__all__ = ["Jet", "variables", "constant", "sqrt", "sin", "cos", "exp", "log"]


@lru_cache(maxsize=64)
def _product_map(n, D):
    """Flat index pairs ``(p, q)`` and targets ``t`` of a truncated product."""
    shape = (D + 1,) * n
    idx = np.indices(shape).reshape(n, -1)
    flat = np.flatnonzero(idx.sum(axis=0) <= D)
    mi = idx[:, flat]
    deg = mi.sum(axis=0)
    p, q = np.nonzero(deg[:, None] + deg[None, :] <= D)
    t = np.ravel_multi_index(tuple(mi[:, p] + mi[:, q]), shape)
    return flat[p], flat[q], t


class Jet:
    __slots__ = ("c", "n", "D", "valid")
    __array_priority__ = 100

    def __init__(self, coeffs, D, valid=None):
        self.c = coeffs
        self.n = coeffs.ndim
        self.D = D
        self.valid = D if valid is None else valid

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, value, n, D):
        c = np.zeros((D + 1,) * n, dtype=complex)
        c[(0,) * n] = value
        return cls(c, D)

    @classmethod
    def var(cls, i, value, n, D):
        jet = cls.const(value, n, D)
        if D >= 1:
            idx = [0] * n
            idx[i] = 1
            jet.c[tuple(idx)] = 1.0
        return jet

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.const(other, self.n, self.D)

    # inspection ---------------------------------------------------------
    @property
    def value(self):
        return complex(self.c[(0,) * self.n])

    def partial(self, alpha):
        """Mixed partial derivative of multi-index ``alpha`` at the base point."""
        if sum(alpha) > self.valid:
            raise ValueError(f"derivative order {sum(alpha)} exceeds valid depth {self.valid}")
        fact = math.prod(math.factorial(a) for a in alpha)
        return complex(self.c[tuple(alpha)]) * fact

    def grad(self):
        return [self.deriv(m) for m in range(self.n)]

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        return Jet(self.c + other.c, self.D, min(self.valid, other.valid))

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.D, self.valid)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other, self.D, self.valid)
        p, q, t = _product_map(self.n, self.D)
        w = self.c.ravel()[p] * other.c.ravel()[q]
        size = self.c.size
        out = np.bincount(t, w.real, size) + 1j * np.bincount(t, w.imag, size)
        return Jet(out.reshape(self.c.shape), self.D, min(self.valid, other.valid))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other, self.D, self.valid)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        if isinstance(k, int) and k >= 0:
            out = Jet.const(1.0, self.n, self.D)
            for _ in range(k):
                out = out * self
            return out
        c0 = self.value
        return self.compose(_power_series(c0, k, self.D, c0**k))

    def deriv(self, m):
        """Partial derivative in variable ``m``."""
        c = np.zeros_like(self.c)
        src = [slice(None)] * self.n
        dst = [slice(None)] * self.n
        src[m] = slice(1, None)
        dst[m] = slice(0, -1)
        shape = [1] * self.n
        shape[m] = self.D
        k = np.arange(1, self.D + 1).reshape(shape)
        c[tuple(dst)] = self.c[tuple(src)] * k
        return Jet(c, self.D, self.valid - 1)

    def compose(self, series):
        """``f(self)`` given ``series[k] = f^(k)(value)/k!``."""
        g = Jet(self.c.copy(), self.D, self.valid)
        g.c[(0,) * self.n] = 0.0
        out = Jet.const(series[-1], self.n, self.D)
        for coeff in series[-2::-1]:
            out = out * g + coeff
        out.valid = self.valid
        return out

    def reciprocal(self):
        c0 = self.value
        if c0 == 0:
            raise ZeroDivisionError("reciprocal of a jet with zero constant term")
        series = [(-1) ** k / c0 ** (k + 1) for k in range(self.D + 1)]
        return self.compose(series)

    def __repr__(self):
        return f"Jet(value={self.value!r}, n={self.n}, D={self.D}, valid={self.valid})"


def _power_series(c0, alpha, D, base):
    """Taylor coefficients of ``t**alpha`` at ``c0`` using ``base = c0**alpha``."""
    out = []
    binom = 1.0
    for k in range(D + 1):
        out.append(binom * base / c0**k)
        binom *= (alpha - k) / (k + 1)
    return out


def variables(point, D):
    n = len(point)
    return [Jet.var(i, point[i], n, D) for i in range(n)]


def constant(value, like):
    return Jet.const(value, like.n, like.D)


def sqrt(x, root=None):
    """Square root; ``root`` picks the branch of the constant term."""

    def series(c0, D):
        r = np.sqrt(complex(c0)) if root is None else root
        return _power_series(c0, 0.5, D, r)

    if not isinstance(x, Jet):
        return math.sqrt(x)
    return x.compose(series(x.value, x.D))


def sin(x):
    if not isinstance(x, Jet):
        return math.sin(x)
    s, c = np.sin(x.value), np.cos(x.value)
    cyc = [s, c, -s, -c]
    return x.compose([cyc[k % 4] / math.factorial(k) for k in range(x.D + 1)])


def cos(x):
    if not isinstance(x, Jet):
        return math.cos(x)
    s, c = np.sin(x.value), np.cos(x.value)
    cyc = [c, -s, -c, s]
    return x.compose([cyc[k % 4] / math.factorial(k) for k in range(x.D + 1)])


def exp(x):
    if not isinstance(x, Jet):
        return math.exp(x)
    e = np.exp(x.value)
    return x.compose([e / math.factorial(k) for k in range(x.D + 1)])


def log(x):
    if not isinstance(x, Jet):
        return math.log(x)
    c0 = x.value
    series = [np.log(c0)] + [(-1) ** (k + 1) / (k * c0**k) for k in range(1, x.D + 1)]
    return x.compose(series)
