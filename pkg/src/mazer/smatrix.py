"""Batched two-port scattering matrices and the Redheffer star product.

An S-matrix is a tuple ``(r, t, rp, tp)`` of arrays of shape ``(..., 2, 2)``
relating amplitudes on either side of a section::

    left_out  = r  @ left_in + tp @ right_in
    right_out = t  @ left_in + rp @ right_in

Amplitudes are referenced to the section's own boundaries, so propagation
factors ``exp(i q d)`` never exceed one in modulus and composition stays
bounded even with evanescent channels.
"""

import numpy as np

from .errors import SingularMatching


def identity(batch=()):
    eye = np.broadcast_to(np.eye(2, dtype=complex), batch + (2, 2)).copy()
    zero = np.zeros(batch + (2, 2), dtype=complex)
    return zero, eye, zero.copy(), eye.copy()


def propagation(q, width):
    """Free propagation over ``width`` in the channels with wavenumbers ``q`` (shape ``(..., 2)``)."""
    phase = np.exp(1j * q * np.asarray(width)[..., None])
    diag = np.zeros(q.shape + (2,), dtype=complex)
    diag[..., 0, 0] = phase[..., 0]
    diag[..., 1, 1] = phase[..., 1]
    zero = np.zeros_like(diag)
    return zero, diag, zero.copy(), diag.copy()


def interface(w1, q1, w2, q2):
    """Matching of value and derivative between two uniform regions.

    ``w`` holds channel eigenvectors as columns (bare basis), ``q`` the
    channel wavenumbers. Shapes broadcast over leading batch dimensions.
    """
    w1, w2 = np.broadcast_arrays(np.asarray(w1, dtype=complex), np.asarray(w2, dtype=complex))
    q1, q2 = np.broadcast_arrays(np.asarray(q1, dtype=complex), np.asarray(q2, dtype=complex))
    if np.any(q1 == 0) or np.any(q2 == 0):
        raise SingularMatching("channel at threshold (zero wavenumber); perturb k slightly")
    scale = max(np.max(np.abs(q1)), np.max(np.abs(q2)))
    wq1 = w1 * (q1[..., None, :] / scale)
    wq2 = w2 * (q2[..., None, :] / scale)
    batch = w1.shape[:-2]
    lhs = np.empty(batch + (4, 4), dtype=complex)
    rhs = np.empty(batch + (4, 4), dtype=complex)
    # unknowns (left_out, right_out); knowns (left_in, right_in)
    lhs[..., :2, :2] = -w1
    lhs[..., :2, 2:] = w2
    lhs[..., 2:, :2] = wq1
    lhs[..., 2:, 2:] = wq2
    rhs[..., :2, :2] = w1
    rhs[..., :2, 2:] = -w2
    rhs[..., 2:, :2] = wq1
    rhs[..., 2:, 2:] = wq2
    try:
        s = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatching("interface matching is singular") from exc
    return s[..., :2, :2], s[..., 2:, :2], s[..., 2:, 2:], s[..., :2, 2:]


def star(a, b):
    """Redheffer star product: section ``a`` followed by section ``b`` (to its right)."""
    r_a, t_a, rp_a, tp_a = a
    r_b, t_b, rp_b, tp_b = b
    eye = np.eye(2)
    x = np.linalg.solve(eye - rp_a @ r_b, t_a)
    y = np.linalg.solve(eye - r_b @ rp_a, tp_b)
    return (
        r_a + tp_a @ r_b @ x,
        t_b @ x,
        rp_b + t_b @ rp_a @ y,
        tp_a @ y,
    )


def cascade(stack):
    """Star-compose a batch of sections ordered left to right along axis 0.

    Pairwise tree reduction: ``log2(len)`` vectorised levels.
    """
    stack = tuple(np.asarray(m) for m in stack)
    while stack[0].shape[0] > 1:
        count = stack[0].shape[0]
        even = count - count % 2
        left = tuple(m[0:even:2] for m in stack)
        right = tuple(m[1:even:2] for m in stack)
        paired = star(left, right)
        if count % 2:
            paired = tuple(np.concatenate([p, m[-1:]], axis=0) for p, m in zip(paired, stack))
        stack = paired
    return tuple(m[0] for m in stack)
