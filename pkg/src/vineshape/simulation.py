"""Ground-truth centerlines, virtual IMUs and measurement corruption.

A :class:`GroundTruthShape` is a chain of straight and constant-curvature
pieces with a twist-free (parallel transport) frame. It is evaluated by
centerline arc length. IMUs ride on the robot material, and the material on
the outside of a bend does not stretch, so sensors are placed by *material
length*: along a piece of curvature ``kappa`` the material advances
``(1 + kappa * edge_offset)`` per unit of centerline, where ``edge_offset`` is
the distance from the centerline to the inextensible edge (``d / 2`` in the
hinge model). On straight runs the two lengths coincide.

Frames: body x is the tangent; planar shapes lie in the world xy plane and
positive curvature turns left (about +z). The default base sits at the origin
facing +x.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .calibration import (
    DriftModel, ImuSample, apply_drift, random_unit_vector, rng_stream, sample_sensor_rates,
)
from .quaternion import Pose, Quat, cross3, quat_mul, unit
from .reconstruction import RobotGeometry

DEFAULT_EDGE_OFFSET = 12.9 / 2.0
# slack when counting sensors that fit on a length that is a multiple of s
_PLACEMENT_TOL = 1e-9


class InvalidShape(ValueError):
    """Shape parameters that cannot describe a centerline."""


@dataclass(frozen=True)
class Piece:
    """Straight run (``kappa == 0``) or circular arc bending about ``axis``.

    ``axis`` is a unit vector in the piece's start frame, perpendicular to the
    tangent (body x).
    """

    length: float
    kappa: float = 0.0
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def pose_at(self, start: Pose, u: float) -> Pose:
        q = start.orientation
        if self.kappa == 0.0:
            return Pose(start.position + u * q.rotate((1.0, 0.0, 0.0)), q)
        phi = self.kappa * u
        a = np.asarray(self.axis)
        # sin(phi)/kappa and (1 - cos(phi))/kappa written as multiples of u so a
        # vanishing (even denormal) curvature degrades to a straight run
        if phi < 1e-8:
            along, side = u, 0.5 * u * phi
        else:
            along = u * math.sin(phi) / phi
            side = u * 2.0 * math.sin(0.5 * phi) ** 2 / phi
        local = np.array([along, 0.0, 0.0]) + side * cross3(a, (1.0, 0.0, 0.0))
        pos = start.position + q.rotate(local)
        return Pose(pos, quat_mul(q, Quat.from_axis_angle(a, phi)))


@dataclass
class GroundTruthShape:
    pieces: list[Piece]
    base: Pose = field(default_factory=Pose)
    edge_offset: float = DEFAULT_EDGE_OFFSET
    description: str = ""

    def __post_init__(self):
        if not self.pieces:
            raise InvalidShape("shape needs at least one piece")
        if self.edge_offset < 0:
            raise InvalidShape("edge_offset must be >= 0")
        self._starts = [0.0]
        self._material_starts = [0.0]
        self._poses = [Pose(np.asarray(self.base.position, dtype=float), self.base.orientation)]
        for p in self.pieces:
            if p.length < 0 or p.kappa < 0:
                raise InvalidShape("piece length and curvature must be >= 0")
            if p.kappa > 0 and abs(p.axis[0]) > 1e-9:
                raise InvalidShape("bend axis must be perpendicular to the tangent")
            self._poses.append(p.pose_at(self._poses[-1], p.length))
            self._starts.append(self._starts[-1] + p.length)
            self._material_starts.append(self._material_starts[-1] + p.length * self._stretch(p))

    def _stretch(self, piece: Piece) -> float:
        return 1.0 + piece.kappa * self.edge_offset

    @property
    def total_length(self) -> float:
        """Centerline length (cm)."""
        return self._starts[-1]

    @property
    def material_length(self) -> float:
        """Length of the inextensible edge, i.e. everted robot length (cm)."""
        return self._material_starts[-1]

    def _locate(self, starts, value):
        i = bisect.bisect_right(starts, value) - 1
        return min(max(i, 0), len(self.pieces) - 1)

    def evaluate(self, ell: float) -> Pose:
        if ell < -1e-9 or ell > self.total_length + 1e-9:
            raise ValueError(f"arc length {ell} outside [0, {self.total_length}]")
        ell = min(max(ell, 0.0), self.total_length)
        i = self._locate(self._starts, ell)
        return self.pieces[i].pose_at(self._poses[i], ell - self._starts[i])

    __call__ = evaluate

    def material_at(self, ell: float) -> float:
        i = self._locate(self._starts, ell)
        return self._material_starts[i] + (ell - self._starts[i]) * self._stretch(self.pieces[i])

    def centerline_at(self, sigma: float) -> float:
        """Centerline arc length at material length ``sigma``."""
        if sigma < -1e-9 or sigma > self.material_length + 1e-9:
            raise ValueError(f"material length {sigma} outside [0, {self.material_length}]")
        i = self._locate(self._material_starts, sigma)
        ell = self._starts[i] + (sigma - self._material_starts[i]) / self._stretch(self.pieces[i])
        return min(max(ell, 0.0), self.total_length)

    @property
    def tip(self) -> Pose:
        return self._poses[-1]

    def truncated(self, length: float) -> GroundTruthShape:
        """Shape cut at centerline arc length ``length``."""
        if not 0 < length <= self.total_length + 1e-9:
            raise InvalidShape(f"cannot truncate a {self.total_length} cm shape to {length} cm")
        pieces = []
        for p, start in zip(self.pieces, self._starts):
            if start >= length:
                break
            pieces.append(replace(p, length=min(p.length, length - start)))
        return GroundTruthShape(pieces, self.base, self.edge_offset, self.description)

    def truncated_material(self, sigma: float) -> GroundTruthShape:
        """Shape cut where ``sigma`` cm of material has been everted."""
        return self.truncated(self.centerline_at(sigma))

    def with_edge_offset(self, edge_offset: float) -> GroundTruthShape:
        return GroundTruthShape(list(self.pieces), self.base, edge_offset, self.description)

    def polyline(self, step: float = 0.5) -> np.ndarray:
        n = max(2, math.ceil(self.total_length / step) + 1)
        return np.array([self.evaluate(ell).position for ell in np.linspace(0.0, self.total_length, n)])


def make_passive_bend_shape(
    pre_length: float = 80.0,
    bend_angle: float = 90.0,
    bend_radius: float = DEFAULT_EDGE_OFFSET,
    total_length: float = 173.4,
    edge_offset: float = DEFAULT_EDGE_OFFSET,
) -> GroundTruthShape:
    """Straight run, a planar bend of ``bend_angle`` degrees, straight remainder.

    Mimics the robot being pushed against an angled plank.
    """
    if not 0 <= bend_angle <= 90:
        raise InvalidShape(f"bend_angle must be in [0, 90] degrees, got {bend_angle}")
    if pre_length < 0 or bend_radius <= 0:
        raise InvalidShape("pre_length must be >= 0 and bend_radius > 0")
    arc = bend_radius * math.radians(bend_angle)
    if pre_length + arc > total_length + 1e-9:
        raise InvalidShape(
            f"pre_length {pre_length} + bend arc {arc:.3f} exceeds total_length {total_length}"
        )
    pieces = [Piece(pre_length)]
    if bend_angle > 0:
        pieces.append(Piece(arc, 1.0 / bend_radius))
    pieces.append(Piece(max(0.0, total_length - pre_length - arc)))
    return GroundTruthShape(
        [p for p in pieces if p.length > 0] or [Piece(total_length)],
        edge_offset=edge_offset,
        description=f"passive bend {bend_angle:g} deg at {pre_length:g} cm, radius {bend_radius:g} cm",
    )


def make_constant_curvature_shape(kappa: float, length: float,
                                  edge_offset: float = DEFAULT_EDGE_OFFSET) -> GroundTruthShape:
    if not 0 <= kappa <= 0.15:
        raise InvalidShape(f"kappa must be in [0, 0.15] 1/cm, got {kappa}")
    if not length > 0:
        raise InvalidShape("length must be > 0")
    return GroundTruthShape([Piece(length, kappa)], edge_offset=edge_offset,
                            description=f"constant curvature {kappa:g} 1/cm")


def make_grown_shape(base_shape: GroundTruthShape, grown_length: float) -> GroundTruthShape:
    """``base_shape`` grown only to centerline length ``grown_length``."""
    if not 0 < grown_length <= base_shape.total_length + 1e-9:
        raise InvalidShape(f"grown_length must be in (0, {base_shape.total_length}]")
    shape = base_shape.truncated(grown_length)
    shape.description = f"{base_shape.description}, grown to {grown_length:g} cm"
    return shape


def make_hinge_shape(bends: Sequence[tuple[float, Sequence[float]]], geom: RobotGeometry,
                     base: Pose | None = None) -> GroundTruthShape:
    """Shape built exactly from hinge segments, one ``(theta, bend_axis)`` per IMU pair.

    ``bend_axis`` is given in the frame at the start of the segment and must
    be perpendicular to the tangent. IMUs placed by :func:`sample_ideal_imu_frames`
    land exactly on segment boundaries, so the hinge model can represent it
    without error.
    """
    s, d = geom.spacing_s, geom.diameter_d
    pieces = []
    for theta, axis in bends:
        if theta < 0 or theta * d > s * (1 + 1e-12):
            raise InvalidShape(f"hinge bend {theta} rad outside [0, s/d]")
        straight = max(0.0, (s - theta * d) / 2.0)
        if theta == 0:
            pieces.append(Piece(s))
            continue
        ax = unit(axis)
        if abs(ax[0]) > 1e-9:
            raise InvalidShape("hinge bend axis must be perpendicular to the tangent")
        pieces += [Piece(straight), Piece(theta * d / 2.0, 2.0 / d, tuple(ax)), Piece(straight)]
    return GroundTruthShape([p for p in pieces if p.length > 0] or [Piece(s)],
                            base=base or Pose(), edge_offset=d / 2.0, description="hinge chain")


def imu_count(shape: GroundTruthShape, geom: RobotGeometry) -> int:
    """Number of IMUs on the everted material, capped at ``geom.num_imus``."""
    fit = math.floor(shape.material_length / geom.spacing_s + _PLACEMENT_TOL) + 1
    return min(geom.num_imus, fit)


def sample_ideal_imu_frames(shape: GroundTruthShape, geom: RobotGeometry) -> list[ImuSample]:
    """IMU ``i`` at material length ``i * s``, reading the shape frame there."""
    n = imu_count(shape, geom)
    out = []
    for i in range(n):
        sigma = min(i * geom.spacing_s, shape.material_length)
        pose = shape.evaluate(shape.centerline_at(sigma))
        out.append(ImuSample(0.0, i, pose.orientation))
    return out


def imu_positions(shape: GroundTruthShape, geom: RobotGeometry) -> np.ndarray:
    n = imu_count(shape, geom)
    return np.array([
        shape.evaluate(shape.centerline_at(min(i * geom.spacing_s, shape.material_length))).position
        for i in range(n)
    ])


@dataclass(frozen=True)
class TrialConfig:
    geometry: RobotGeometry
    drift: DriftModel
    offset_age_s: float
    shape: GroundTruthShape
    trial_seed: int = 0

    def __post_init__(self):
        if self.offset_age_s < 0:
            raise ValueError("offset_age_s must be >= 0")


def corrupt_samples(ideal: Sequence[ImuSample], cfg: TrialConfig) -> tuple[list[ImuSample], list[ImuSample]]:
    """Straight-configuration snapshot and the drifted, noisy measurement.

    The snapshot sees every IMU in the base frame (robot straight) with fresh
    noise and no drift; the measurement sees ``ideal`` after ``offset_age_s``
    seconds of per-sensor drift plus noise. Each sensor draws from its own
    stream keyed by ``(trial_seed, imu_index, purpose)``.
    """
    drift = cfg.drift
    rates = sample_sensor_rates(replace(drift, seed=_mix(cfg.trial_seed, drift.seed)), len(ideal))
    straight = cfg.shape.base.orientation
    snapshot, measured = [], []
    for sample, (rate, axis) in zip(ideal, rates):
        i = sample.imu_index
        snap_rng = rng_stream(cfg.trial_seed, drift.seed, i, "snapshot")
        meas_rng = rng_stream(cfg.trial_seed, drift.seed, i, "measure")
        mount = mounting_rotation(drift.mounting_std, rng_stream(cfg.trial_seed, drift.seed, i, "mounting"))
        snap_q = apply_drift(quat_mul(straight, mount), rate, axis, 0.0, drift.noise_std, snap_rng)
        snapshot.append(ImuSample(0.0, i, snap_q))
        q = apply_drift(quat_mul(sample.orientation, mount), rate, axis, cfg.offset_age_s,
                        drift.noise_std, meas_rng, walk_std=drift.walk_std)
        measured.append(ImuSample(cfg.offset_age_s, i, q))
    return snapshot, measured


def mounting_rotation(std_deg: float, rng: np.random.Generator) -> Quat:
    """Fixed sensor-to-body misalignment: ``|normal(0, std)|`` degrees about a random axis."""
    if std_deg <= 0:
        return Quat.identity()
    angle = math.radians(abs(rng.normal(0.0, std_deg)))
    return Quat.from_axis_angle(random_unit_vector(rng), angle)


def _mix(a: int, b: int) -> int:
    return int(rng_stream(a, b, "rate-population").integers(0, 2**63 - 1))


__all__ = [
    "GroundTruthShape", "InvalidShape", "Piece", "TrialConfig", "corrupt_samples", "imu_count",
    "imu_positions", "make_constant_curvature_shape", "make_grown_shape", "make_hinge_shape",
    "make_passive_bend_shape", "sample_ideal_imu_frames",
]
