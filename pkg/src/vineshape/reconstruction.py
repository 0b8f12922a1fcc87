"""Hinge-model shape reconstruction.

Each span between consecutive IMUs is modeled as a straight run, a circular
arc, and a second straight run of equal length. The material on the outside
of the bend is inextensible, so for a bend of angle ``theta`` and an inflated
diameter ``d``::

    outer arc length      = theta * d
    centerline arc length = theta * d / 2      (centerline radius d / 2)
    straight run          = (s - theta * d) / 2

Segments are chained from the base: the end pose of one segment is the start
pose of the next. Body x is the centerline tangent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .quaternion import Pose, Quat, Z_AXIS, cross3, quat_mul, quat_to_axis_angle, swing_twist

# relative rotations this close to a pure twist about the tangent are not bends
TWIST_AXIS_DOT = 0.999
ARC_STEP_RAD = 0.05


class BendExceedsSegment(ValueError):
    """A bend angle larger than ``s / d`` leaves no room for the straight runs."""

    def __init__(self, message: str, segment_index: int | None = None):
        super().__init__(message)
        self.segment_index = segment_index


@dataclass(frozen=True)
class RobotGeometry:
    spacing_s: float = 10.2
    diameter_d: float = 12.9
    num_imus: int = 18

    def __post_init__(self):
        if not self.spacing_s > 0:
            raise ValueError(f"spacing_s must be > 0, got {self.spacing_s}")
        if not self.diameter_d > 0:
            raise ValueError(f"diameter_d must be > 0, got {self.diameter_d}")
        if self.num_imus < 2:
            raise ValueError(f"num_imus must be >= 2, got {self.num_imus}")

    @property
    def max_bend(self) -> float:
        """Largest bend angle (rad) one segment can hold."""
        return self.spacing_s / self.diameter_d

    @property
    def length(self) -> float:
        """Straight length from the first to the last IMU (cm)."""
        return (self.num_imus - 1) * self.spacing_s

    def with_imus(self, n: int) -> RobotGeometry:
        return replace(self, num_imus=n)

    def decimated(self, k: int) -> RobotGeometry:
        """Geometry seen when only every ``k``-th IMU is kept."""
        n = (self.num_imus - 1) // k + 1
        return replace(self, spacing_s=k * self.spacing_s, num_imus=n)


@dataclass(frozen=True)
class SegmentShape:
    theta: float
    bend_axis: np.ndarray
    L_arc: float
    L_arc_outer: float
    L_straight: float
    clamped: bool = False
    rotation: Quat = field(default_factory=Quat.identity)


@dataclass
class CenterlinePolyline:
    points: np.ndarray
    imu_indices: list[int]
    tip: Pose
    warnings: list[str] = field(default_factory=list)

    @property
    def imu_positions(self) -> np.ndarray:
        return self.points[self.imu_indices]


def segment_from_rotation(r: Quat, geom: RobotGeometry, strict: bool = False) -> SegmentShape:
    """Hinge segment for relative rotation ``r`` (expressed in the frame of IMU i).

    Only the bend part of ``r`` (its swing away from the tangent) shapes the
    path; any twist about the tangent is carried by the frame alone.
    """
    aa = quat_to_axis_angle(r)
    if aa.degenerate or abs(float(aa.axis[0])) > TWIST_AXIS_DOT:
        theta, axis = 0.0, Z_AXIS.copy()
    else:
        swing, _ = swing_twist(r)
        bend = quat_to_axis_angle(swing)
        theta = bend.angle
        axis = bend.axis if not bend.degenerate else Z_AXIS.copy()
        if bend.degenerate:
            theta = 0.0
    return _segment(theta, axis, geom, strict, r)


def _segment(theta: float, axis: np.ndarray, geom: RobotGeometry, strict: bool, r: Quat) -> SegmentShape:
    s, d = geom.spacing_s, geom.diameter_d
    outer = theta * d
    clamped = False
    if outer > s * (1.0 + 1e-12):
        if strict:
            raise BendExceedsSegment(
                f"bend {math.degrees(theta):.3f} deg exceeds s/d = {math.degrees(s / d):.3f} deg"
            )
        theta, outer, clamped = s / d, s, True
    elif outer > s:
        # theta == s/d up to rounding
        outer = s
    straight = max(0.0, (s - outer) / 2.0)
    return SegmentShape(theta, axis, theta * d / 2.0, outer, straight, clamped, r)


def default_arc_samples(theta: float) -> int:
    return max(2, math.ceil(theta / ARC_STEP_RAD))


def advance_pose(start: Pose, seg: SegmentShape, arc_samples: int | None = None) -> tuple[Pose, list[np.ndarray]]:
    """Walk one straight/arc/straight segment from ``start``.

    Returns the end pose (orientation ``start * seg.rotation``) and the points
    visited after ``start``: the arc start, ``arc_samples`` points along the
    arc and the segment end.
    """
    q = start.orientation
    t = q.rotate((1.0, 0.0, 0.0))
    p = np.asarray(start.position, dtype=float)
    end_q = quat_mul(q, seg.rotation)
    if seg.theta == 0.0:
        end = p + (2.0 * seg.L_straight + seg.L_arc) * t
        return Pose(end, end_q), [end]
    if arc_samples is None:
        arc_samples = default_arc_samples(seg.theta)
    if arc_samples < 1:
        raise ValueError("arc_samples must be >= 1")
    R = seg.L_arc / seg.theta
    n = cross3(q.rotate(seg.bend_axis), t)
    n /= np.linalg.norm(n)

    pts = []
    p1 = p + seg.L_straight * t
    if seg.L_straight > 0:
        pts.append(p1)
    for k in range(1, arc_samples + 1):
        phi = seg.theta * k / arc_samples
        pts.append(p1 + R * math.sin(phi) * t + R * (1.0 - math.cos(phi)) * n)
    t_end = math.cos(seg.theta) * t + math.sin(seg.theta) * n
    end = pts[-1] + seg.L_straight * t_end
    if seg.L_straight > 0:
        pts.append(end)
    return Pose(end, end_q), pts


def reconstruct(
    rotations: Sequence[Quat],
    geom: RobotGeometry,
    base: Pose | None = None,
    arc_samples: int | None = None,
    strict: bool = False,
) -> CenterlinePolyline:
    """Chain hinge segments from ``base`` through every relative rotation."""
    if len(rotations) != geom.num_imus - 1:
        raise ValueError(f"expected {geom.num_imus - 1} rotations, got {len(rotations)}")
    pose = base if base is not None else Pose()
    points = [np.asarray(pose.position, dtype=float)]
    imu_indices = [0]
    warnings = []
    for i, r in enumerate(rotations):
        try:
            seg = segment_from_rotation(r, geom, strict)
        except BendExceedsSegment as exc:
            raise BendExceedsSegment(f"segment {i}: {exc}", segment_index=i) from exc
        if seg.clamped:
            warnings.append(f"segment {i}: bend clamped to s/d")
        pose, pts = advance_pose(pose, seg, arc_samples)
        points.extend(pts)
        imu_indices.append(len(points) - 1)
    return CenterlinePolyline(np.array(points), imu_indices, pose, warnings)


def total_turning(rotations: Sequence[Quat], geom: RobotGeometry) -> float:
    return sum(segment_from_rotation(r, geom).theta for r in rotations)

