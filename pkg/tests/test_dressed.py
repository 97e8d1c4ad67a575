import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from mazer import (
    DegeneratePoint,
    ManifoldParams,
    dressed_point,
    dressed_vectors,
    eigenvalues,
    mixing_angle,
    potential_matrix,
    theta_derivatives,
    trig_pair,
)

SQ2 = math.sqrt(2) / 2


def test_params_validation():
    with pytest.raises(ValueError):
        ManifoldParams(n=-1)
    with pytest.raises(ValueError):
        ManifoldParams(mass=0)
    with pytest.raises(ValueError):
        ManifoldParams(g=float("nan"))
    assert ManifoldParams(g=2, n=3).beta == 4.0


@pytest.mark.parametrize(
    "g, delta, n, u, expected",
    [
        (1, 0, 0, 1, [[0, 1], [1, 0]]),
        (1, 2, 3, 0, [[-1, 0], [0, 1]]),
        (2, 2, 0, 0.5, [[-1, 1], [1, 1]]),
    ],
)
def test_potential_matrix(g, delta, n, u, expected):
    v = potential_matrix(ManifoldParams(g=g, delta=delta, n=n), u)
    np.testing.assert_array_equal(v, expected)
    assert np.trace(v) == 0


def test_potential_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        potential_matrix(ManifoldParams(), float("inf"))


@pytest.mark.parametrize(
    "g, delta, n, omega, u, expected",
    [
        (1, 0, 0, 0, 1, (1, -1)),
        (1, 2, 3, 0, 1, (math.sqrt(5), -math.sqrt(5))),
        (1, 0, 0, 2, 0, (1, 1)),
    ],
)
def test_eigenvalues(g, delta, n, omega, u, expected):
    e_plus, e_minus = eigenvalues(ManifoldParams(g=g, delta=delta, n=n, omega=omega), u)
    assert e_plus == pytest.approx(expected[0], abs=1e-15)
    assert e_minus == pytest.approx(expected[1], abs=1e-15)


def test_mixing_angle_examples():
    assert mixing_angle(ManifoldParams(g=0.7, delta=0, n=2), 1.0) == pytest.approx(math.pi / 4, abs=1e-15)
    assert mixing_angle(ManifoldParams(g=1, delta=1), 1e-12) == pytest.approx(math.pi / 2, abs=1e-11)
    # delta = 2 beta u  ->  cot 2theta = -1
    p = ManifoldParams(g=1, delta=2 * 0.6, n=0)
    assert mixing_angle(p, 0.6) == pytest.approx(3 * math.pi / 8, abs=1e-15)


def test_degenerate_point():
    p = ManifoldParams(g=1, delta=0)
    for fn in (mixing_angle, trig_pair):
        with pytest.raises(DegeneratePoint):
            fn(p, 0.0)
    with pytest.raises(DegeneratePoint):
        theta_derivatives(p, 0.0, 1.0, 0.0)


def test_trig_pair_examples():
    assert trig_pair(ManifoldParams(g=1, delta=0), 1.0) == pytest.approx((0, 1), abs=1e-15)
    assert trig_pair(ManifoldParams(g=1, delta=2), 0.0) == pytest.approx((-1, 0), abs=1e-15)
    assert trig_pair(ManifoldParams(g=1, delta=1.2), 0.6) == pytest.approx((-SQ2, SQ2), abs=1e-15)


def test_theta_derivatives_trivial():
    assert theta_derivatives(ManifoldParams(g=1, delta=0), 0.4, 0.7, -2.0) == (0.0, 0.0)
    assert theta_derivatives(ManifoldParams(g=1, delta=3), 0.4, 0.0, 0.0) == (0.0, 0.0)


def _theta_mp(u, beta, delta):
    return mpmath.atan2(beta * u, -delta / 2) / 2


def test_theta_derivatives_against_finite_differences():
    p = ManifoldParams(g=1, n=0, delta=1)
    u0, du0, d2u0 = 0.5, 0.3, -0.1
    t1, t2 = theta_derivatives(p, u0, du0, d2u0)
    # hand-evaluated closed forms: lambda^2 = 1/2
    assert t1 == pytest.approx(-0.15, rel=1e-14)
    assert t2 == pytest.approx(0.14, rel=1e-14)

    def u_of(z):
        return u0 + du0 * z + 0.5 * d2u0 * z * z

    h = 1e-5
    fd1 = (mixing_angle(p, u_of(h)) - mixing_angle(p, u_of(-h))) / (2 * h)
    assert fd1 == pytest.approx(t1, rel=1e-6)
    # second difference at h = 1e-5 loses ~1e-6 to roundoff in doubles; evaluate the angle at 40 digits
    with mpmath.workdps(40):
        hm = mpmath.mpf("1e-5")
        th = [_theta_mp(u0 + du0 * z + d2u0 * z * z / 2, 1, 1) for z in (-hm, 0, hm)]
        fd2 = float((th[2] - 2 * th[1] + th[0]) / hm**2)
    assert fd2 == pytest.approx(t2, rel=1e-6)


@pytest.mark.parametrize(
    "theta, plus, minus",
    [
        (0.0, (1, 0), (0, 1)),
        (math.pi / 4, (SQ2, SQ2), (-SQ2, SQ2)),
        (math.pi / 2, (0, 1), (-1, 0)),
    ],
)
def test_dressed_vectors(theta, plus, minus):
    phi_p, phi_m = dressed_vectors(theta)
    assert tuple(phi_p) == pytest.approx(plus, abs=1e-15)
    assert tuple(phi_m) == pytest.approx(minus, abs=1e-15)


params_st = st.builds(
    ManifoldParams,
    g=st.floats(-3, 3),
    delta=st.floats(-5, 5),
    n=st.integers(0, 5),
    omega=st.floats(-2, 2),
)


@settings(max_examples=300, deadline=None)
@given(params=params_st, u=st.floats(-2, 2))
def test_eigen_residual(params, u):
    lam = math.hypot(params.delta / 2, params.beta * u)
    assume(lam > 1e-8)
    v = potential_matrix(params, u)
    e_plus, e_minus = eigenvalues(params, u)
    phi_p, phi_m = (vec.as_array() for vec in dressed_vectors(mixing_angle(params, u)))
    tol = 1e-12 * max(1.0, lam)
    assert np.linalg.norm(v @ phi_p - (e_plus - params.offset) * phi_p) <= tol
    assert np.linalg.norm(v @ phi_m - (e_minus - params.offset) * phi_m) <= tol
    c, s = trig_pair(params, u)
    assert abs(c * c + s * s - 1) <= 1e-12
    assert e_plus >= e_minus


@settings(max_examples=200, deadline=None)
@given(params=params_st, u=st.floats(0, 2))
def test_branch_and_trig_agreement(params, u):
    assume(math.hypot(params.delta / 2, params.beta * u) > 0)
    theta = mixing_angle(params, u)
    if params.beta >= 0:
        assert 0 <= theta <= math.pi / 2
        assert trig_pair(params, u)[1] >= 0
    c, s = trig_pair(params, u)
    assert math.cos(2 * theta) == pytest.approx(c, abs=1e-12)
    assert math.sin(2 * theta) == pytest.approx(s, abs=1e-12)


@given(theta=st.floats(-10, 10))
def test_dressed_vectors_orthonormal(theta):
    phi_p, phi_m = dressed_vectors(theta)
    assert abs(phi_p.norm() - 1) <= 1e-14
    assert abs(phi_m.norm() - 1) <= 1e-14
    assert abs(np.dot(phi_p.as_array(), phi_m.as_array())) <= 1e-14


def test_vectorised_matches_scalar():
    p = ManifoldParams(g=1.3, delta=-0.7, n=2)
    u = np.linspace(-1, 2, 7)
    thetas = mixing_angle(p, u)
    for ui, ti in zip(u, thetas):
        assert mixing_angle(p, ui) == ti


def test_dressed_point_fields():
    p = ManifoldParams(g=1, delta=1)
    point = dressed_point(p, 0.5, 0.3, -0.1)
    assert point.e_plus - point.e_minus == 2 * point.lam
    assert point.cos2t**2 + point.sin2t**2 == pytest.approx(1, abs=1e-12)
    assert point.dtheta == pytest.approx(-0.15)


def test_theta_derivatives_tiny_splitting():
    # lambda^2 would underflow here; the closed forms must stay finite
    t1, t2 = theta_derivatives(ManifoldParams(g=0, delta=1e-101), 1.0, 0.0, 0.0)
    assert (t1, t2) == (0.0, 0.0)
    p = ManifoldParams(g=1e-160, delta=1e-160)
    t1, t2 = theta_derivatives(p, 0.5, 1.0, 0.0)
    assert math.isfinite(t1) and math.isfinite(t2)
    # scale invariant: same as beta = delta = 1, where lambda^2 = 1/2
    assert (t1, t2) == pytest.approx((-0.5, 1.0), rel=1e-14)
