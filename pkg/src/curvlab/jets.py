"""Second-order forward-mode jets over the four chart coordinates.

A :class:`Jet2` carries ``value``, ``grad`` and ``hess`` of a scalar field,
optionally for a whole batch of points at once: ``value`` has the batch
shape ``S``, ``grad`` has shape ``S + (4,)`` and ``hess`` ``S + (4, 4)``.
Arithmetic is truncated Taylor arithmetic, so derivatives are exact up to
floating point rounding.
"""

import numpy as np

from .errors import FieldDomainError

DIM = 4


class Jet2:
    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad, hess):
        self.value = value
        self.grad = grad
        self.hess = hess

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c, shape=()):
        value = np.full(shape, float(c))
        return cls(value, np.zeros(shape + (DIM,)), np.zeros(shape + (DIM, DIM)))

    @classmethod
    def coordinate(cls, i, points):
        """Jet of the coordinate function ``x_{i+1}`` at ``points`` (shape ``S + (4,)``)."""
        points = np.asarray(points, dtype=float)
        shape = points.shape[:-1]
        grad = np.zeros(shape + (DIM,))
        grad[..., i] = 1.0
        return cls(points[..., i].copy(), grad, np.zeros(shape + (DIM, DIM)))

    @property
    def shape(self):
        return np.shape(self.value)

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r})"

    # -- chain rule -----------------------------------------------------------

    def _compose(self, f0, f1, f2):
        """Apply a scalar function with derivatives ``f0, f1, f2`` evaluated at ``self.value``."""
        g = self.grad
        f1e = np.expand_dims(f1, -1)
        hess = f1e[..., None] * self.hess + np.expand_dims(f2, (-1, -2)) * g[..., :, None] * g[..., None, :]
        return Jet2(f0, f1e * g, hess)

    # -- arithmetic -----------------------------------------------------------

    @staticmethod
    def _lift(other, like):
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(other, like.shape)

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __add__(self, other):
        other = self._lift(other, self)
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other, self)
        return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

    def __rsub__(self, other):
        return self._lift(other, self) - self

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            c = float(other)
            return Jet2(c * self.value, c * self.grad, c * self.hess)
        u, v = self, other
        ue = np.expand_dims(u.value, (-1, -2))
        ve = np.expand_dims(v.value, (-1, -2))
        cross = u.grad[..., :, None] * v.grad[..., None, :]
        return Jet2(
            u.value * v.value,
            np.expand_dims(u.value, -1) * v.grad + np.expand_dims(v.value, -1) * u.grad,
            ue * v.hess + ve * u.hess + cross + np.swapaxes(cross, -1, -2),
        )

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        if np.any(v == 0.0):
            raise FieldDomainError("division by zero")
        inv = 1.0 / v
        return self._compose(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        return self * self._lift(other, self).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other, self) * self.reciprocal()

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("Jet2 supports integer exponents only")
        n = int(n)
        if n == 0:
            return Jet2.constant(1.0, self.shape)
        if n < 0:
            return (self ** (-n)).reciprocal()
        v = self.value
        f2 = n * (n - 1) * v ** (n - 2) if n >= 2 else np.zeros_like(v)
        return self._compose(v**n, n * v ** (n - 1), f2)

    # -- elementary functions -------------------------------------------------

    def sin(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return self._compose(s, c, -s)

    def cos(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return self._compose(c, -s, -c)

    def exp(self):
        e = np.exp(self.value)
        return self._compose(e, e, e)

    def log(self):
        v = self.value
        if np.any(v <= 0.0):
            raise FieldDomainError("log of non-positive value")
        inv = 1.0 / v
        return self._compose(np.log(v), inv, -inv * inv)

    def sqrt(self):
        v = self.value
        if np.any(v <= 0.0):
            raise FieldDomainError("sqrt of non-positive value (derivative undefined)")
        r = np.sqrt(v)
        return self._compose(r, 0.5 / r, -0.25 / (r * v))


def stack(jets):
    """Stack a nested list of jets into arrays ``(value, grad, hess)``.

    For an ``m x n`` nested list of batch-shape ``S`` jets the results have
    shapes ``S + (m, n)``, ``S + (4, m, n)`` (derivative index first) and
    ``S + (4, 4, m, n)``.
    """
    rows = [[j.value for j in row] for row in jets]
    value = np.moveaxis(np.array(rows), (0, 1), (-2, -1))
    grad = np.moveaxis(np.array([[j.grad for j in row] for row in jets]), (0, 1), (-2, -1))
    hess = np.moveaxis(np.array([[j.hess for j in row] for row in jets]), (0, 1), (-2, -1))
    return value, grad, hess
