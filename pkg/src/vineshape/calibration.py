"""Straight-configuration offsetting and the IMU drift/noise model.

Offsetting stores, for each consecutive IMU pair, the relative orientation
seen while the robot is straight. Removing it from later readings leaves
only the bend between the two sensors::

    offset_i = inv(q_i) * q_{i+1}                  (straight snapshot)
    r_i      = inv(offset_i) * (inv(q_i) * q_{i+1}) (any later reading)

so a reading identical to the snapshot gives ``r_i = identity``.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quaternion import Quat, axis_angle_to_quat, AxisAngle, quat_inv, quat_mul, unit


class MalformedSnapshot(ValueError):
    """A set of IMU samples is not exactly one sample per IMU index."""


@dataclass(frozen=True)
class ImuSample:
    time: float
    imu_index: int
    orientation: Quat

    def __post_init__(self):
        if self.time < 0:
            raise ValueError(f"sample time must be >= 0, got {self.time}")
        if self.imu_index < 0:
            raise ValueError(f"imu_index must be >= 0, got {self.imu_index}")


@dataclass(frozen=True)
class OffsetTable:
    offsets: tuple[Quat, ...]
    captured_at: float = 0.0

    def __len__(self):
        return len(self.offsets)

    @property
    def num_imus(self) -> int:
        return len(self.offsets) + 1

    def decimate(self, k: int) -> OffsetTable:
        """Offsets between IMUs ``0, k, 2k, ...`` as products of the pairwise ones."""
        if k < 1:
            raise ValueError("decimation factor must be >= 1")
        if k == 1:
            return self
        out = []
        for start in range(0, self.num_imus - k, k):
            q = self.offsets[start]
            for j in range(start + 1, start + k):
                q = quat_mul(q, self.offsets[j])
            out.append(q)
        return OffsetTable(tuple(out), self.captured_at)


@dataclass(frozen=True)
class DriftModel:
    """Per-sensor orientation drift and white noise.

    Each sensor drifts at a constant rate (deg/min) about its own fixed random
    axis. Rates are drawn from ``normal(mean_rate, rate_spread)`` clamped at 0.
    ``walk_std`` (deg per sqrt-minute) adds an optional random-walk component;
    it is 0 (off) unless configured. ``mounting_std`` (deg) is the spread of
    each sensor's fixed misalignment on the robot body; offsetting hides it
    only while the robot stays straight.
    """

    mean_rate: float = 1.33
    rate_spread: float = 1.0
    noise_std: float = 0.5
    seed: int = 0
    walk_std: float = 0.0
    mounting_std: float = 0.0

    def __post_init__(self):
        for name in ("mean_rate", "rate_spread", "noise_std", "walk_std", "mounting_std"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"DriftModel.{name} must be finite and >= 0, got {value}")


def rng_stream(seed: int, *keys) -> np.random.Generator:
    """Independent generator keyed by ``seed`` and any ints/strings.

    Streams depend only on their keys, never on call order.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for key in keys:
        if isinstance(key, str):
            entropy.append(zlib.crc32(key.encode()))
        else:
            entropy.append(int(key) & 0xFFFFFFFFFFFFFFFF)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.standard_normal(3)
        n = float(np.linalg.norm(v))
        if n > 1e-12:
            return v / n


def _by_index(samples: Sequence[ImuSample], num_imus: int | None) -> list[ImuSample]:
    if not samples:
        raise MalformedSnapshot("no samples")
    by_index: dict[int, ImuSample] = {}
    for s in samples:
        if s.imu_index in by_index:
            raise MalformedSnapshot(f"duplicate imu_index {s.imu_index}")
        by_index[s.imu_index] = s
    n = num_imus if num_imus is not None else max(by_index) + 1
    missing = [i for i in range(n) if i not in by_index]
    if missing:
        raise MalformedSnapshot(f"missing imu_index {missing}")
    extra = sorted(i for i in by_index if i >= n)
    if extra:
        raise MalformedSnapshot(f"imu_index {extra} out of range for {n} IMUs")
    if n < 2:
        raise MalformedSnapshot("need at least two IMUs")
    return [by_index[i] for i in range(n)]


def compute_offsets(straight_snapshot: Sequence[ImuSample], num_imus: int | None = None) -> OffsetTable:
    ordered = _by_index(straight_snapshot, num_imus)
    offsets = tuple(
        quat_mul(quat_inv(a.orientation), b.orientation) for a, b in zip(ordered, ordered[1:])
    )
    return OffsetTable(offsets, max(s.time for s in ordered))


def corrected_relative_rotations(current: Sequence[ImuSample], table: OffsetTable) -> list[Quat]:
    ordered = _by_index(current, table.num_imus)
    return [
        quat_mul(quat_inv(off), quat_mul(quat_inv(a.orientation), b.orientation))
        for off, a, b in zip(table.offsets, ordered, ordered[1:])
    ]


def sample_sensor_rates(model: DriftModel, n: int) -> list[tuple[float, np.ndarray]]:
    """Per-sensor ``(rate_deg_per_min, unit_axis)`` pairs, deterministic in ``model.seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rate_rng = rng_stream(model.seed, "rates")
    axis_rng = rng_stream(model.seed, "axes")
    rates = rate_rng.normal(model.mean_rate, model.rate_spread, size=n)
    return [(max(0.0, float(r)), random_unit_vector(axis_rng)) for r in rates]


def apply_drift(
    q: Quat,
    rate: float,
    axis,
    elapsed: float,
    noise_std: float,
    rng: np.random.Generator | None = None,
    walk_std: float = 0.0,
) -> Quat:
    """Corrupt orientation ``q`` with ``elapsed`` seconds of drift plus noise.

    The drift rotation (``rate * elapsed / 60`` degrees, jittered by
    ``normal(0, noise_std)``) is about ``axis`` in the sensor frame; an
    independent rotation of ``|normal(0, noise_std)|`` degrees about a random
    axis follows. With ``noise_std == 0`` and ``walk_std == 0`` no random
    numbers are drawn.
    """
    if elapsed < 0:
        raise ValueError("elapsed must be >= 0")
    if (noise_std > 0 or walk_std > 0) and rng is None:
        raise ValueError("an rng stream is required when noise_std or walk_std > 0")
    drift_deg = rate * elapsed / 60.0
    if noise_std > 0:
        drift_deg += rng.normal(0.0, noise_std)
    out = q
    if drift_deg != 0.0:
        out = quat_mul(out, _rot_deg(axis, drift_deg))
    if walk_std > 0 and elapsed > 0:
        walk = rng.normal(0.0, walk_std * math.sqrt(elapsed / 60.0), size=3)
        out = quat_mul(out, Quat.from_rotvec(np.radians(walk)))
    if noise_std > 0:
        mag = abs(rng.normal(0.0, noise_std))
        out = quat_mul(out, _rot_deg(random_unit_vector(rng), mag))
    return out


def _rot_deg(axis, degrees: float) -> Quat:
    # negative angles flip the axis so AxisAngle stays in [0, pi]
    a = unit(axis)
    rad = math.radians(degrees)
    if rad < 0:
        a, rad = -a, -rad
    return axis_angle_to_quat(AxisAngle(a, rad))
