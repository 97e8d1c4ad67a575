"""Second-order forward-mode jets: value, first and second derivative.

Components may be floats or numpy arrays of a common shape, so one pass
evaluates a mode function on a whole grid.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def _lift(x):
    if isinstance(x, Jet2):
        return x
    return Jet2(x, 0.0 * x, 0.0 * x)


@dataclass(frozen=True)
class Jet2:
    v: object
    d1: object
    d2: object

    @classmethod
    def variable(cls, z):
        z = np.asarray(z, dtype=float)
        return cls(z, np.ones_like(z), np.zeros_like(z))

    @classmethod
    def constant(cls, c, like=0.0):
        like = np.asarray(like, dtype=float)
        return cls(np.full_like(like, c), np.zeros_like(like), np.zeros_like(like))

    def __add__(self, other):
        other = _lift(other)
        return Jet2(self.v + other.v, self.d1 + other.d1, self.d2 + other.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.v, -self.d1, -self.d2)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) + (-self)

    def __mul__(self, other):
        o = _lift(other)
        return Jet2(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        if np.any(self.v == 0):
            raise DomainError("division by zero")
        r = 1.0 / self.v
        return Jet2(r, -self.d1 * r * r, (2.0 * self.d1 * self.d1 * r - self.d2) * r * r)

    def __truediv__(self, other):
        return self * _lift(other).reciprocal()

    def __rtruediv__(self, other):
        return _lift(other) * self.reciprocal()

    def chain(self, f0, f1, f2):
        """Compose with a scalar function given its value and first two derivatives at ``v``."""
        return Jet2(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)

    def powc(self, c):
        """Raise to a constant real exponent."""
        c = float(c)
        v = self.v
        if c == int(c) and c >= 0:
            k = int(c)
            f1 = k * v ** max(k - 1, 0)
            f2 = k * (k - 1) * v ** max(k - 2, 0)
            return self.chain(v**k, f1, f2)
        if c == int(c):
            return _lift(self.reciprocal()).powc(-c)
        if np.any(v <= 0):
            raise DomainError("non-integer power of a non-positive base")
        return self.chain(v**c, c * v ** (c - 1), c * (c - 1) * v ** (c - 2))


def sin(x):
    s, c = np.sin(x.v), np.cos(x.v)
    return x.chain(s, c, -s)


def cos(x):
    s, c = np.sin(x.v), np.cos(x.v)
    return x.chain(c, -s, -c)


def exp(x):
    e = np.exp(x.v)
    return x.chain(e, e, e)


def log(x):
    if np.any(x.v <= 0):
        raise DomainError("log of a non-positive value")
    r = 1.0 / x.v
    return x.chain(np.log(x.v), r, -r * r)


def tanh(x):
    t = np.tanh(x.v)
    s2 = 1.0 - t * t
    return x.chain(t, s2, -2.0 * t * s2)


def sech(x):
    s = 1.0 / np.cosh(x.v)
    t = np.tanh(x.v)
    return x.chain(s, -s * t, s * (t * t - s * s))


def sqrt(x):
    if np.any(x.v <= 0):
        # the derivative is unbounded at 0
        raise DomainError("sqrt of a non-positive value")
    r = np.sqrt(x.v)
    return x.chain(r, 0.5 / r, -0.25 / (r * x.v))
