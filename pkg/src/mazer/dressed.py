"""Dressed-state algebra of a single excitation manifold.

Bare basis ordering is ``(|n+1, g>, |n, e>)``; index 0 is the ground-state
channel, index 1 the excited one. Units have hbar = 1 and the detuning is
``delta = omega_atom - omega_cavity``.

All functions accept a scalar mode value ``u`` or a numpy array of them and
return matching shapes.
"""

from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np

from .errors import DegeneratePoint


@dataclass(frozen=True)
class ManifoldParams:
    """Physical inputs for the ``n``-photon manifold.

    ``mass`` defaults to 1/2 so that the kinetic operator is ``-d^2/dz^2``.
    ``omega`` only enters the common energy offset ``omega*(n + 1/2)``.
    """

    g: float = 1.0
    delta: float = 0.0
    n: int = 0
    mass: float = 0.5
    omega: float = 0.0
    beta: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise ValueError(f"photon number must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        for name in ("g", "delta", "mass", "omega"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass!r}")
        object.__setattr__(self, "beta", self.g * math.sqrt(self.n + 1))

    @property
    def offset(self):
        """Common energy shift ``omega*(n + 1/2)`` of both dressed levels."""
        return self.omega * (self.n + 0.5)

    def replace(self, **changes):
        kwargs = dict(g=self.g, delta=self.delta, n=self.n, mass=self.mass, omega=self.omega)
        kwargs.update(changes)
        return ManifoldParams(**kwargs)


class BareVector2(NamedTuple):
    """Coefficients of a state on ``|n+1, g>`` and ``|n, e>``."""

    comp_g: complex
    comp_e: complex

    def as_array(self):
        return np.array([self.comp_g, self.comp_e])

    def norm(self):
        return float(np.linalg.norm(self.as_array(), axis=0))


@dataclass(frozen=True)
class DressedPoint:
    u: float
    lam: float
    theta: float
    cos2t: float
    sin2t: float
    dtheta: float
    d2theta: float
    e_plus: float
    e_minus: float


def _check_u(u):
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("mode value must be finite")
    return u


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def splitting(params, u_val):
    """Half splitting ``lambda = sqrt(delta^2/4 + beta^2 u^2)`` of the dressed levels."""
    u = _check_u(u_val)
    return _out(np.hypot(0.5 * params.delta, params.beta * u))


def _nondegenerate_lambda(params, u):
    lam = np.hypot(0.5 * params.delta, params.beta * u)
    if np.any(lam == 0.0):
        raise DegeneratePoint("lambda = 0: coupling and detuning both vanish, mixing angle undefined")
    return lam


def potential_matrix(params, u_val):
    """Interaction restricted to the manifold, offset removed: ``[[-delta/2, beta u], [beta u, delta/2]]``."""
    u = _check_u(u_val)
    c = params.beta * u
    h = 0.5 * params.delta
    out = np.empty(u.shape + (2, 2))
    out[..., 0, 0] = -h
    out[..., 1, 1] = h
    out[..., 0, 1] = c
    out[..., 1, 0] = c
    return out


def eigenvalues(params, u_val):
    """Dressed energies ``(E+, E-)`` including the ``omega*(n + 1/2)`` offset."""
    lam = np.hypot(0.5 * params.delta, params.beta * _check_u(u_val))
    return _out(params.offset + lam), _out(params.offset - lam)


def mixing_angle(params, u_val):
    """Mixing angle with ``cot 2theta = -(delta/2) / (beta u)``.

    Branch: ``theta = atan2(beta u, -delta/2) / 2``, which lies in
    ``[0, pi/2]`` for ``u >= 0`` and keeps ``sin 2theta`` with the sign of ``u``.
    """
    u = _check_u(u_val)
    _nondegenerate_lambda(params, u)
    return _out(0.5 * np.arctan2(params.beta * u, -0.5 * params.delta))


def trig_pair(params, u_val):
    """``(cos 2theta, sin 2theta) = (-delta/2, beta u) / lambda`` without forming the angle."""
    u = _check_u(u_val)
    lam = _nondegenerate_lambda(params, u)
    return _out(-0.5 * params.delta / lam), _out(params.beta * u / lam)


def theta_derivatives(params, u, du, d2u):
    """First and second z-derivatives of the mixing angle from ``(u, u', u'')``.

    theta'  = -beta delta u' / (4 lambda^2)
    theta'' = -(beta delta / 4) (u'' / lambda^2 - 2 beta^2 u u'^2 / lambda^4)
    """
    u = _check_u(u)
    du = np.asarray(du, dtype=float)
    d2u = np.asarray(d2u, dtype=float)
    lam = _nondegenerate_lambda(params, u)
    b = params.beta
    # ratios to lambda rather than lambda^2, which underflows for tiny splittings
    cd = params.delta / lam
    su = b * u / lam
    sp = b * du / lam
    dtheta = -0.25 * cd * sp
    d2theta = -0.25 * cd * (b * d2u / lam) + 0.5 * cd * su * sp * sp
    return _out(dtheta), _out(d2theta)


def dressed_vectors(theta):
    """``Phi+ = (cos, sin)`` and ``Phi- = (-sin, cos)`` in the bare basis."""
    c, s = np.cos(theta), np.sin(theta)
    return BareVector2(_out(c), _out(s)), BareVector2(_out(-s), _out(c))


def rotation(theta):
    """Matrix whose columns are ``Phi+`` and ``Phi-``; shape ``theta.shape + (2, 2)``."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(theta.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 1, 0] = s
    out[..., 0, 1] = -s
    out[..., 1, 1] = c
    return out


def dressed_point(params, u, du=0.0, d2u=0.0):
    """Every dressed quantity at ``u``; fields are arrays when ``u`` is."""
    u = _out(np.asarray(u, dtype=float))
    lam = splitting(params, u)
    theta = mixing_angle(params, u)
    cos2t, sin2t = trig_pair(params, u)
    dtheta, d2theta = theta_derivatives(params, u, du, d2u)
    e_plus, e_minus = eigenvalues(params, u)
    return DressedPoint(u, lam, theta, cos2t, sin2t, dtheta, d2theta, e_plus, e_minus)
