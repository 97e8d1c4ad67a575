"""Stationary scattering of an atom incident in ``|n, e>`` on the cavity.

Three routes to the same observables:

* :func:`mesa_scatter` solves the exact 8x8 matching problem for ``u = 1``;
* :func:`numeric_scatter_bare` freezes ``u`` on slices and star-composes the
  slice S-matrices in the bare (diabatic) basis;
* :func:`numeric_scatter_dressed` integrates the coupled equations for the
  dressed-basis coefficients with derivative couplings ``theta'`` and
  ``theta''`` (variant ``derived``) or the literal form with ``theta'^2`` in
  place of ``theta''`` (variant ``literal``).

Energies exclude the common offset ``omega*(n + 1/2)``; the total energy is
``E = k^2/2m + delta/2``. Transmission amplitudes are referenced to ``z = 0``
(``psi_c = t_c exp(i k_c z)`` for ``z > L``).
"""

from dataclasses import dataclass
from enum import Enum
import math
import warnings

import numpy as np

from . import smatrix
from .dressed import ManifoldParams, mixing_angle, rotation, theta_derivatives
from .errors import DegeneratePoint, NonConvergent, SingularMatching, StiffnessWarning
from .modefn import ModeExpr

G, E = 0, 1  # bare channel indices

STIFFNESS_LIMIT = 1e12


class Variant(str, Enum):
    DERIVED = "derived"
    COMMENT_LITERAL = "literal"


@dataclass(frozen=True)
class ScatterConfig:
    params: ManifoldParams
    mode: ModeExpr
    k: float
    slices: int = 256
    grid_step: float = None
    variant: Variant = Variant.DERIVED
    L: float = None

    def __post_init__(self):
        if self.L is None:
            object.__setattr__(self, "L", self.mode.length)
        if not math.isclose(self.L, self.mode.length, rel_tol=1e-15):
            raise ValueError(f"L={self.L} does not match the mode's length {self.mode.length}")
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"incident wavenumber must be positive, got {self.k!r}")
        if int(self.slices) != self.slices or self.slices < 1:
            raise ValueError(f"slices must be a positive integer, got {self.slices!r}")
        if self.grid_step is None:
            object.__setattr__(self, "grid_step", self.L / 2048)
        if not (0 < self.grid_step <= self.L / 8):
            raise ValueError(f"grid_step must lie in (0, L/8], got {self.grid_step!r}")
        object.__setattr__(self, "variant", Variant(self.variant))


@dataclass(frozen=True)
class ScatterResult:
    r_e: complex
    r_g: complex
    t_e: complex
    t_g: complex
    k_e: float
    k_g: complex
    P_refl_e: float
    P_refl_g: float
    P_trans_e: float
    P_trans_g: float
    solver: str = ""

    @property
    def probs(self):
        return {
            "P_refl_e": self.P_refl_e,
            "P_refl_g": self.P_refl_g,
            "P_trans_e": self.P_trans_e,
            "P_trans_g": self.P_trans_g,
        }

    @property
    def p_emission(self):
        return self.P_refl_g + self.P_trans_g

    @property
    def flux_error(self):
        return abs(1.0 - (self.P_refl_e + self.P_refl_g + self.P_trans_e + self.P_trans_g))

    @property
    def g_channel_open(self):
        return self.k_g.real > 0


def csqrt(x):
    """Square root of real ``x`` on the branch with non-negative imaginary part."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 0, np.sqrt(np.abs(x)) + 0j, 1j * np.sqrt(np.abs(x)))
    return complex(out) if out.ndim == 0 else out


def total_energy(params, k):
    return k * k / (2.0 * params.mass) + 0.5 * params.delta


def channel_momenta(params, k, u=1.0):
    """``(k_g, k_plus, k_minus)``: outer ground-channel and inner dressed wavenumbers.

    ``k_g = sqrt(k^2 + 2 m delta)``, ``k_pm = sqrt(k^2 + m delta -+ 2 m lambda(u))``.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    m = params.mass
    lam = math.hypot(0.5 * params.delta, params.beta * u)
    return (
        csqrt(k * k + 2 * m * params.delta),
        csqrt(k * k + m * params.delta - 2 * m * lam),
        csqrt(k * k + m * params.delta + 2 * m * lam),
    )


def _angle(params, u):
    """Mixing angle, with an arbitrary fixed basis where the potential vanishes identically."""
    u = np.asarray(u, dtype=float)
    lam = np.hypot(0.5 * params.delta, params.beta * u)
    safe = np.where(lam == 0, 1.0, u)
    theta = 0.5 * np.arctan2(params.beta * safe, -0.5 * params.delta)
    return np.where(lam == 0, 0.25 * np.pi, theta), lam


def _assemble(r, t_local, k, k_g, L, solver, beta=1.0):
    """Build a :class:`ScatterResult` from outer amplitudes for incidence in the e-channel."""
    kk = np.array([k_g, k])
    if beta == 0:
        # block-diagonal problem: the g-channel is never populated
        r, t_local = np.array(r, dtype=complex), np.array(t_local, dtype=complex)
        r[G] = t_local[G] = 0
    t = t_local * np.exp(-1j * kk * L)
    weight = np.where(kk.real > 0, kk.real / k, 0.0)
    p_r = np.abs(r) ** 2 * weight
    p_t = np.abs(t) ** 2 * weight
    return ScatterResult(
        r_e=complex(r[E]), r_g=complex(r[G]), t_e=complex(t[E]), t_g=complex(t[G]),
        k_e=float(k), k_g=complex(k_g),
        P_refl_e=float(p_r[E]), P_refl_g=float(p_r[G]),
        P_trans_e=float(p_t[E]), P_trans_g=float(p_t[G]),
        solver=solver,
    )


def emission_probability(result):
    """Flux-weighted probability of leaving in ``|n+1, g>``: ``(|r_g|^2 + |t_g|^2) Re(k_g) / k``."""
    if result.k_g.real <= 0:
        return 0.0
    return (abs(result.r_g) ** 2 + abs(result.t_g) ** 2) * result.k_g.real / result.k_e


# ---------------------------------------------------------------- analytic mesa


MAX_CONDITION = 1e13


def mesa_scatter(params, L, k):
    """Exact solution for ``u = 1`` on ``(0, L)`` by matching plane waves at both walls."""
    if not (L > 0 and k > 0):
        raise ValueError("L and k must be positive")
    k_g, k_p, k_m = channel_momenta(params, k)
    theta, _ = _angle(params, 1.0)
    w = rotation(theta)
    ks = np.array([k_p, k_m])
    kc = np.array([k_g, k])
    if np.any(ks == 0) or np.any(kc == 0):
        raise SingularMatching("a channel sits exactly at threshold; perturb k slightly")
    ph = np.exp(1j * ks * L)
    scale = max(abs(k), np.max(np.abs(ks)), abs(k_g))
    # unknowns: r_g, r_e, A+, A-, B+, B-, T_g, T_e  (B and T referenced at z = L)
    m = np.zeros((8, 8), dtype=complex)
    rhs = np.zeros(8, dtype=complex)
    for c in (G, E):
        m[c, c] = -1.0
        m[c, 2:4] = w[c]
        m[c, 4:6] = w[c] * ph
        m[2 + c, c] = kc[c] / scale
        m[2 + c, 2:4] = w[c] * ks / scale
        m[2 + c, 4:6] = -w[c] * ks * ph / scale
        m[4 + c, 2:4] = w[c] * ph
        m[4 + c, 4:6] = w[c]
        m[4 + c, 6 + c] = -1.0
        m[6 + c, 2:4] = w[c] * ks * ph / scale
        m[6 + c, 4:6] = -w[c] * ks / scale
        m[6 + c, 6 + c] = -kc[c] / scale
    rhs[E] = 1.0
    rhs[2 + E] = k / scale
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularMatching(f"mesa matching system is singular (condition {cond:.3g})", cond)
    x = np.linalg.solve(m, rhs)
    return _assemble(x[0:2], x[6:8], k, k_g, L, "analytic", params.beta)


# ---------------------------------------------------------------- bare slicing


def _slab_modes(params, u, energy):
    theta, lam = _angle(params, u)
    two_m = 2.0 * params.mass
    q = csqrt(two_m * (energy - np.stack([lam, -lam], axis=-1)))
    return rotation(theta), np.asarray(q).reshape(np.shape(u) + (2,))


def bare_smatrix(config):
    """Full outer S-matrix ``(r, t, rp, tp)`` of the sliced cavity, bare channels ``(g, e)``.

    Amplitudes are referenced to ``z = 0`` on the left and ``z = L`` on the right.
    Returns the S-matrix and the outer wavenumbers ``(k_g, k)``.
    """
    p = config.params
    n = int(config.slices)
    L = config.L
    energy = total_energy(p, config.k)
    k_g = csqrt(config.k**2 + 2 * p.mass * p.delta)
    k_out = np.array([k_g, config.k], dtype=complex)
    width = L / n
    mid = (np.arange(n) + 0.5) * width
    u = config.mode.interior012(mid)[0]
    w, q = _slab_modes(p, u, energy)
    eye = np.eye(2)
    w_left = np.concatenate([eye[None], w])
    q_left = np.concatenate([k_out[None], q])
    w_right = np.concatenate([w, eye[None]])
    q_right = np.concatenate([q, k_out[None]])
    faces = smatrix.interface(w_left, q_left, w_right, q_right)
    props = smatrix.propagation(q, np.full(n, width))
    # interleave: face_0, prop_0, face_1, prop_1, ..., face_n
    stack = []
    for f, pr in zip(faces, props):
        seq = np.empty((2 * n + 1, 2, 2), dtype=complex)
        seq[0::2] = f
        seq[1::2] = pr
        stack.append(seq)
    s = smatrix.cascade(stack)
    if not all(np.all(np.isfinite(m)) for m in s):
        raise SingularMatching("slice composition produced non-finite amplitudes")
    return s, k_out


def numeric_scatter_bare(config, convergence_tol=None):
    """Sliced bare-basis solver; midpoint value of ``u`` on each of ``config.slices`` slices.

    With ``convergence_tol`` set, the calculation is repeated at twice the
    slice count and a :class:`NonConvergent` warning is issued if the
    emission probability moves by more than the tolerance.
    """
    (r, t, _, _), (k_g, _) = bare_smatrix(config)
    result = _assemble(r[:, E], t[:, E], config.k, k_g, config.L, f"bare[N={config.slices}]", config.params.beta)
    if convergence_tol is not None:
        finer = _replace(config, slices=2 * config.slices)
        (r2, t2, _, _), _ = bare_smatrix(finer)
        fine = _assemble(r2[:, E], t2[:, E], config.k, k_g, config.L, "")
        change = abs(fine.p_emission - result.p_emission)
        if change > convergence_tol:
            warnings.warn(
                f"p_emission changed by {change:.3g} when doubling slices to {2 * config.slices}",
                NonConvergent,
                stacklevel=2,
            )
    return result


def bare_richardson(config):
    """Probabilities extrapolated from ``N`` and ``2N`` slices, assuming an ``N^-2`` error."""
    coarse = numeric_scatter_bare(config)
    fine = numeric_scatter_bare(_replace(config, slices=2 * config.slices))
    return {key: (4.0 * fine.probs[key] - coarse.probs[key]) / 3.0 for key in fine.probs}


def flux_smatrix(config):
    """Flux-normalised S-matrix over open ports ``[left g, left e, right g, right e]``."""
    (r, t, rp, tp), k_out = bare_smatrix(config)
    full = np.block([[r, tp], [t, rp]])
    kk = np.concatenate([k_out, k_out])
    open_ = kk.real > 0
    v = np.sqrt(kk.real[open_])
    sub = full[np.ix_(open_, open_)]
    return sub * v[:, None] / v[None, :]


def _replace(config, **changes):
    kwargs = dict(
        params=config.params, mode=config.mode, k=config.k, slices=config.slices,
        grid_step=config.grid_step, variant=config.variant, L=config.L,
    )
    kwargs.update(changes)
    return ScatterConfig(**kwargs)


# ---------------------------------------------------------------- dressed shooting


@dataclass
class DressedPath:
    """Solution of the dressed-basis equations on the integer grid points."""

    z: np.ndarray
    phi: np.ndarray      # (npts, 2): phi+, phi-
    dphi: np.ndarray     # (npts, 2)
    d2phi: np.ndarray    # (npts, 2)
    dtheta: np.ndarray
    d2theta: np.ndarray


def _dressed_fields(config, z):
    """``lambda, theta, theta', theta''`` on the points ``z`` inside ``[0, L]``."""
    p = config.params
    u, du, d2u = config.mode.interior012(z)
    lam = np.hypot(0.5 * p.delta, p.beta * u)
    if p.delta == 0:
        # theta is pinned at pi/4, so the + state carries beta*u with its sign
        zero = np.zeros_like(z)
        return p.beta * u, np.full_like(z, 0.25 * np.pi), zero, zero.copy()
    if p.beta != 0 and np.min(lam) <= 1e-6 * abs(p.beta):
        raise DegeneratePoint(
            f"dressed splitting falls to {np.min(lam):.3g} <= 1e-6*beta inside the cavity"
        )
    theta = mixing_angle(p, u)
    dtheta, d2theta = theta_derivatives(p, u, du, d2u)
    return lam, theta, dtheta, d2theta


def _generator(config, lam, dtheta, d2theta, energy):
    """Matrices ``A(z)`` of the first-order system ``y' = A y``, ``y = (phi+, phi-, phi+', phi-')``."""
    two_m = 2.0 * config.params.mass
    a = np.zeros(lam.shape + (4, 4))
    a[..., 0, 2] = 1.0
    a[..., 1, 3] = 1.0
    t1, t2 = dtheta, d2theta
    if config.variant is Variant.DERIVED:
        a[..., 2, 0] = t1 * t1 + two_m * (lam - energy)
        a[..., 2, 1] = t2
        a[..., 2, 3] = 2.0 * t1
        a[..., 3, 1] = t1 * t1 + two_m * (-lam - energy)
        a[..., 3, 0] = -t2
        a[..., 3, 2] = -2.0 * t1
    else:
        sq = t1 * t1
        a[..., 2, 0] = two_m * (lam - sq - energy)
        a[..., 2, 1] = -two_m * sq
        a[..., 2, 3] = -two_m * 2.0 * t1
        a[..., 3, 1] = two_m * (-lam - sq - energy)
        a[..., 3, 0] = two_m * sq
        a[..., 3, 2] = two_m * 2.0 * t1
    return a


def _rk4_steps(a0, ah, a1, h):
    """One-step RK4 propagators for the linear system, batched over steps."""
    eye = np.eye(4)
    k1 = a0
    k2 = ah @ (eye + 0.5 * h * k1)
    k3 = ah @ (eye + 0.5 * h * k2)
    k4 = a1 @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


_K = np.array([[0.0, -1.0], [1.0, 0.0]])


def _to_dressed(psi, dpsi, theta, dtheta):
    r = rotation(theta)
    phi = r.T @ psi
    return phi, r.T @ dpsi - dtheta * (_K @ phi)


def _to_bare(phi, dphi, theta, dtheta):
    r = rotation(theta)
    return r @ phi, r @ (dphi + dtheta * (_K @ phi))


def _dressed_solve(config, keep_path=False):
    p = config.params
    L, k = config.L, config.k
    steps = int(math.ceil(L / config.grid_step - 1e-9))
    h = L / steps
    z_half = np.linspace(0.0, L, 2 * steps + 1)
    lam, theta, dtheta, d2theta = _dressed_fields(config, z_half)
    energy = total_energy(p, k)
    gen = _generator(config, lam, dtheta, d2theta, energy)

    k_g = csqrt(k * k + 2 * p.mass * p.delta)
    kc = np.array([k_g, k], dtype=complex)
    if np.any(kc == 0):
        raise SingularMatching("outer channel at threshold; perturb k slightly")

    # basis solutions fixed by pure transmission into g or e at z = L, integrated backwards
    psi_L = np.eye(2, dtype=complex)
    dpsi_L = np.diag(1j * kc)
    phi, dphi = _to_dressed(psi_L, dpsi_L, theta[-1], dtheta[-1])
    y = np.concatenate([phi, dphi])  # (4, 2)

    # step j goes from grid node j+1 down to j
    props = _rk4_steps(gen[2:][::2][::-1], gen[1:-1:2][::-1], gen[:-2:2][::-1], -h)
    path = [y] if keep_path else None
    start = np.max(np.abs(y))
    growth = 1.0
    for prop in props:
        y = prop @ y
        growth = max(growth, np.max(np.abs(y)) / start)
        if keep_path:
            path.append(y)
    if not np.all(np.isfinite(y)):
        raise SingularMatching("dressed integration overflowed")
    if growth > STIFFNESS_LIMIT:
        warnings.warn(
            f"evanescent growth factor {growth:.3g} exceeds {STIFFNESS_LIMIT:.0e}; "
            "use a shorter cavity or the bare solver",
            StiffnessWarning,
            stacklevel=3,
        )

    psi0, dpsi0 = _to_bare(y[:2], y[2:], theta[0], dtheta[0])
    incoming = 0.5 * (psi0 + dpsi0 / (1j * kc[:, None]))
    outgoing = 0.5 * (psi0 - dpsi0 / (1j * kc[:, None]))
    try:
        coef = np.linalg.solve(incoming, np.array([0.0, 1.0]))
    except np.linalg.LinAlgError as exc:
        raise SingularMatching("dressed shooting basis is degenerate") from exc
    r = outgoing @ coef
    result = _assemble(r, coef, k, k_g, L, f"dressed-{config.variant.value}", config.params.beta)
    if not keep_path:
        return result, None
    ys = np.array(path[::-1]) @ coef  # (steps+1, 4), ordered by increasing z
    nodes = slice(0, None, 2)
    d2 = np.einsum("nij,nj->ni", gen[nodes], ys)[:, 2:]
    return result, DressedPath(
        z=z_half[nodes], phi=ys[:, :2], dphi=ys[:, 2:], d2phi=d2,
        dtheta=dtheta[nodes], d2theta=d2theta[nodes],
    )


def numeric_scatter_dressed(config):
    """Dressed-basis coupled equations integrated with fixed-step RK4 at ``config.grid_step``.

    The atom enters in ``|n, e>``; bare amplitudes are matched to the dressed
    coefficients through the rotation at ``0+`` and ``L-``, including the
    ``theta'`` term in the derivative. For ``variant='literal'`` the flux error
    is a diagnostic, not a guarantee.
    """
    return _dressed_solve(config)[0]


def dressed_path(config):
    """Like :func:`numeric_scatter_dressed` but also returns the solution along the grid."""
    return _dressed_solve(config, keep_path=True)
