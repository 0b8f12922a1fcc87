"""Quaternion helpers against scipy's Rotation as an independent oracle."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial.transform import Rotation

from vineshape.quaternion import (
    THETA_EPS, AxisAngle, Quat, angle_between, axis_angle_to_quat, quat_inv, quat_mul,
    quat_to_axis_angle, swing_twist,
)

finite = st.floats(-1.0, 1.0, allow_nan=False)
quats = st.tuples(finite, finite, finite, finite).filter(lambda c: sum(x * x for x in c) > 1e-3).map(
    lambda c: Quat(*c))
vectors = st.tuples(*[st.floats(-10, 10, allow_nan=False)] * 3).map(np.array)


def scipy_rot(q: Quat) -> Rotation:
    # scipy stores (x, y, z, w)
    return Rotation.from_quat([q.x, q.y, q.z, q.w])


def test_identity_rotation_leaves_vectors():
    v = np.array([1.0, -2.0, 3.5])
    assert np.allclose(Quat().rotate(v), v)


def test_zero_quaternion_rejected():
    with pytest.raises(ValueError):
        Quat(0, 0, 0, 0)


@given(quats)
def test_normalized_and_canonical(q):
    assert math.isclose(q.w ** 2 + q.x ** 2 + q.y ** 2 + q.z ** 2, 1.0, rel_tol=1e-12)
    assert q.w >= 0.0


def test_sign_canonicalization_at_w_zero():
    assert Quat(0, -1, 0, 0) == Quat(0, 1, 0, 0)
    assert Quat(0, 0, -1, 0).y == 1.0
    assert Quat(-0.0, 0.0, 0.0, -1.0).z == 1.0


@given(quats, vectors)
def test_rotate_matches_scipy(q, v):
    assert np.allclose(q.rotate(v), scipy_rot(q).apply(v), atol=1e-9)


@given(quats, quats, vectors)
def test_product_is_local_composition(a, b, v):
    # applying b in a's frame: R(a*b) = R(a) R(b)
    expected = (scipy_rot(a) * scipy_rot(b)).apply(v)
    assert np.allclose(quat_mul(a, b).rotate(v), expected, atol=1e-9)


@given(quats)
def test_inverse(q):
    assert quat_mul(q, quat_inv(q)).angle < 1e-7


@given(quats)
def test_matrix_is_orthonormal_and_matches_scipy(q):
    m = q.as_matrix()
    assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)
    assert np.allclose(m, scipy_rot(q).as_matrix(), atol=1e-12)


@given(quats)
def test_axis_angle_round_trip(q):
    aa = quat_to_axis_angle(q)
    assert 0.0 <= aa.angle <= math.pi + 1e-12
    back = axis_angle_to_quat(aa)
    assert angle_between(q, back) < 1e-7
    assert math.isclose(aa.angle, scipy_rot(q).magnitude(), abs_tol=1e-9)


def test_axis_angle_degenerate_below_eps():
    aa = quat_to_axis_angle(Quat.from_rotvec([THETA_EPS / 10, 0, 0]))
    assert aa.degenerate
    assert np.allclose(aa.axis, [0, 0, 1])


@pytest.mark.parametrize("deg", [0.5, 30.0, 90.0, 179.0, 180.0])
def test_known_angle(deg):
    q = Quat.from_axis_angle((0, 1, 0), math.radians(deg))
    aa = quat_to_axis_angle(q)
    assert math.isclose(math.degrees(aa.angle), deg, abs_tol=1e-9)
    assert np.allclose(aa.axis, [0, 1, 0])


def test_from_rotvec_matches_scipy():
    rv = np.array([0.3, -0.4, 1.2])
    q = Quat.from_rotvec(rv)
    assert angle_between(q, Quat(*np.roll(Rotation.from_rotvec(rv).as_quat(), 1))) < 1e-12


@given(quats)
def test_swing_twist_recomposes(q):
    swing, twist = swing_twist(q)
    assert angle_between(quat_mul(swing, twist), q) < 1e-7
    # swing axis is perpendicular to x, twist axis is along x
    assert abs(swing.x) < 1e-9
    assert abs(twist.y) < 1e-12 and abs(twist.z) < 1e-12


def test_swing_twist_pure_twist_and_pure_swing():
    twist_only = Quat.from_axis_angle((1, 0, 0), 0.7)
    swing, twist = swing_twist(twist_only)
    assert swing.angle < 1e-12 and math.isclose(twist.angle, 0.7)
    swing_only = Quat.from_axis_angle((0, 0.6, 0.8), 1.1)
    swing, twist = swing_twist(swing_only)
    assert twist.angle < 1e-12 and math.isclose(swing.angle, 1.1)


def test_axis_angle_dataclass():
    aa = AxisAngle(np.array([1.0, 0, 0]), 0.0)
    assert aa.degenerate
