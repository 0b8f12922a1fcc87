"""Quaternion and 3-vector helpers.

Conventions
-----------
* Quaternions are Hamilton, right-handed, stored as ``(w, x, y, z)``.
* Every :class:`Quat` is renormalized on construction and sign-canonicalized
  so that ``w >= 0`` (ties at ``w == 0`` are broken on the first non-zero
  vector component). ``q`` and ``-q`` therefore compare equal.
* Orientations map body vectors to world vectors: ``v_world = q.rotate(v_body)``.
* Composition is local (right) composition: ``quat_mul(a, b)`` is rotation
  ``b`` expressed in the frame already rotated by ``a``. If ``a`` is the pose
  of frame A in the world and ``b`` the pose of frame B in A, then
  ``quat_mul(a, b)`` is the pose of B in the world.
* Vectors are length-3 ``numpy`` arrays; positions in centimeters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# below this angle a rotation is treated as identity and its axis is undefined
THETA_EPS = 1e-9

Z_AXIS = np.array([0.0, 0.0, 1.0])


def vec3(x, y=None, z=None) -> np.ndarray:
    if y is None:
        arr = np.asarray(x, dtype=float)
        if arr.shape != (3,):
            raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
        return arr.copy()
    return np.array([float(x), float(y), float(z)])


def cross3(a, b) -> np.ndarray:
    """Cross product of two 3-vectors (much cheaper than ``np.cross`` for one pair)."""
    a0, a1, a2 = float(a[0]), float(a[1]), float(a[2])
    b0, b1, b2 = float(b[0]), float(b[1]), float(b[2])
    return np.array([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = math.sqrt(float(v @ v))
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


@dataclass(frozen=True)
class Quat:
    w: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        w, x, y, z = float(self.w), float(self.x), float(self.y), float(self.z)
        n = math.hypot(w, x, y, z)
        if n == 0.0 or not math.isfinite(n):
            raise ValueError("quaternion must have finite non-zero norm")
        w, x, y, z = w / n, x / n, y / n, z / n
        if w < 0.0 or (w == 0.0 and _first_nonzero(x, y, z) < 0.0):
            w, x, y, z = -w, -x, -y, -z
        # -0.0 and 0.0 must store identically
        object.__setattr__(self, "w", w + 0.0)
        object.__setattr__(self, "x", x + 0.0)
        object.__setattr__(self, "y", y + 0.0)
        object.__setattr__(self, "z", z + 0.0)

    @classmethod
    def identity(cls) -> Quat:
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, arr) -> Quat:
        w, x, y, z = (float(c) for c in arr)
        return cls(w, x, y, z)

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> Quat:
        return axis_angle_to_quat(AxisAngle(unit(axis), float(angle)))

    @classmethod
    def from_rotvec(cls, rotvec) -> Quat:
        rv = np.asarray(rotvec, dtype=float)
        angle = math.sqrt(float(rv @ rv))
        if angle < THETA_EPS:
            return cls.identity()
        return cls.from_axis_angle(rv / angle, angle)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def rotate(self, v) -> np.ndarray:
        """Rotate vector ``v`` from the body frame into the world frame."""
        vx, vy, vz = (float(c) for c in v)
        w, x, y, z = self.w, self.x, self.y, self.z
        # t = 2 * (u x v)
        tx = 2.0 * (y * vz - z * vy)
        ty = 2.0 * (z * vx - x * vz)
        tz = 2.0 * (x * vy - y * vx)
        return np.array([
            vx + w * tx + (y * tz - z * ty),
            vy + w * ty + (z * tx - x * tz),
            vz + w * tz + (x * ty - y * tx),
        ])

    def as_matrix(self) -> np.ndarray:
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array([
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ])

    def __mul__(self, other: Quat) -> Quat:
        return quat_mul(self, other)

    @property
    def angle(self) -> float:
        """Rotation angle in ``[0, pi]``."""
        return 2.0 * math.atan2(math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z), self.w)


def _first_nonzero(x: float, y: float, z: float) -> float:
    for c in (x, y, z):
        if c != 0.0:
            return c
    return 0.0


@dataclass(frozen=True)
class AxisAngle:
    """Unit axis plus angle in ``[0, pi]``.

    For ``angle < THETA_EPS`` the axis is the placeholder ``(0, 0, 1)`` and
    carries no geometric meaning.
    """

    axis: np.ndarray = field(default_factory=lambda: Z_AXIS.copy())
    angle: float = 0.0

    @property
    def degenerate(self) -> bool:
        return self.angle < THETA_EPS


@dataclass(frozen=True)
class Pose:
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: Quat = field(default_factory=Quat.identity)

    @property
    def tangent(self) -> np.ndarray:
        """World direction of the body x axis (the centerline tangent)."""
        return self.orientation.rotate((1.0, 0.0, 0.0))


def quat_mul(a: Quat, b: Quat) -> Quat:
    """Hamilton product ``a * b`` (``b`` applied in the frame of ``a``)."""
    return Quat(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def quat_inv(q: Quat) -> Quat:
    return Quat(q.w, -q.x, -q.y, -q.z)


def quat_to_axis_angle(q: Quat) -> AxisAngle:
    vn = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    angle = 2.0 * math.atan2(vn, q.w)
    if angle < THETA_EPS or vn == 0.0:
        return AxisAngle(Z_AXIS.copy(), angle)
    return AxisAngle(np.array([q.x / vn, q.y / vn, q.z / vn]), angle)


def axis_angle_to_quat(aa: AxisAngle) -> Quat:
    half = 0.5 * aa.angle
    s = math.sin(half)
    ax, ay, az = (float(c) for c in aa.axis)
    return Quat(math.cos(half), ax * s, ay * s, az * s)


def angle_between(a: Quat, b: Quat) -> float:
    """Angle of the rotation taking ``a`` to ``b``, in ``[0, pi]``."""
    return quat_mul(quat_inv(a), b).angle


def swing_twist(q: Quat, twist_axis=(1.0, 0.0, 0.0)) -> tuple[Quat, Quat]:
    """Split ``q`` into ``swing * twist`` with ``twist`` about ``twist_axis``.

    The swing has its axis perpendicular to ``twist_axis``.
    """
    t = unit(twist_axis)
    v = np.array([q.x, q.y, q.z])
    p = float(v @ t) * t
    if math.hypot(q.w, *p) < 1e-12:
        # (near) 180 degree swing, no usable twist component
        return q, Quat.identity()
    twist = Quat(q.w, *p)
    swing = quat_mul(q, quat_inv(twist))
    return swing, twist
