"""Desk-scale versions of the drift, passive, active, length and spacing studies.

Every sweep is a pure function of its settings and ``master_seed``. Each trial
gets its own seed derived from ``(master_seed, kind, trial_index)``, so trials
can run in any order (or in parallel) and the records come out the same.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .calibration import (
    DriftModel, ImuSample, apply_drift, compute_offsets, corrected_relative_rotations,
    rng_stream, sample_sensor_rates,
)
from .quaternion import Quat, angle_between, quat_to_axis_angle
from .reconstruction import (
    CenterlinePolyline, RobotGeometry, advance_pose, reconstruct, segment_from_rotation,
)
from .simulation import (
    GroundTruthShape, TrialConfig, corrupt_samples, make_constant_curvature_shape,
    make_hinge_shape, make_passive_bend_shape, sample_ideal_imu_frames,
)
from .stats import RegressionSummary, ols_fit

PASSIVE_ANGLES = (0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0)
ACTIVE_KAPPAS = (0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15)
LENGTHS = (30.0, 50.0, 70.0, 90.0, 110.0, 130.0, 150.0, 175.0)
SPACING_MULTIPLES = (1, 2, 4, 8, 16)


@dataclass(frozen=True)
class ExperimentRecord:
    independent_var: float
    tip_error_pct: float
    trial_seed: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tip_error_pct >= 0:
            raise ValueError("tip_error_pct must be >= 0")


@dataclass(frozen=True)
class DriftSample:
    sensor: int
    time_s: float
    error_deg: float


@dataclass(frozen=True)
class SweepSettings:
    """Everything a sweep needs besides its independent variable.

    ``offset_age_s`` is the mean time between offsetting and measurement;
    each trial draws its own age from ``normal(offset_age_s, age_jitter_s)``
    clipped at zero. ``bend_radius_factor`` scales the ground-truth distance
    from centerline to the inextensible edge relative to the model's ``d/2``;
    1 matches the reconstruction model, 2 is a deliberate mismatch.
    """

    geometry: RobotGeometry = RobotGeometry()
    drift: DriftModel = DriftModel()
    offset_age_s: float = 84.0
    age_jitter_s: float = 10.0
    master_seed: int = 0
    robot_length: float | None = None
    bend_radius_factor: float = 1.0
    pre_length: float = 80.0
    bend_radius: float | None = None
    passive_shape: str = "arc"
    growth_kappa: float = 0.02
    strict: bool = False
    arc_samples: int | None = None

    def __post_init__(self):
        if self.offset_age_s < 0 or self.age_jitter_s < 0:
            raise ValueError("offset ages must be >= 0")
        if self.bend_radius_factor <= 0:
            raise ValueError("bend_radius_factor must be > 0")
        if self.passive_shape not in ("arc", "hinge"):
            raise ValueError("passive_shape must be 'arc' or 'hinge'")
        if self.robot_length is not None and self.robot_length <= 0:
            raise ValueError("robot_length must be > 0")

    @property
    def length(self) -> float:
        return self.robot_length if self.robot_length is not None else self.geometry.length

    @property
    def edge_offset(self) -> float:
        return self.bend_radius_factor * self.geometry.diameter_d / 2.0

    def noiseless(self) -> SweepSettings:
        return replace(self, drift=replace(self.drift, mean_rate=0.0, rate_spread=0.0, noise_std=0.0,
                                           walk_std=0.0, mounting_std=0.0))


@dataclass
class TrialLog:
    """One recorded trial: what the sensors saw plus the ground truth."""

    shape: GroundTruthShape
    geometry: RobotGeometry
    snapshot: list[ImuSample]
    measured: list[ImuSample]
    robot_length: float
    trial_seed: int
    offset_age_s: float = 0.0


def trial_seed(master_seed: int, kind: str, index: int) -> int:
    return int(rng_stream(master_seed, kind, index).integers(0, 2**31 - 1))


def tip_error_percent(estimated_tip, true_tip, robot_length: float) -> float:
    if not robot_length > 0:
        raise ValueError("robot_length must be > 0")
    diff = np.asarray(estimated_tip, dtype=float) - np.asarray(true_tip, dtype=float)
    return 100.0 * float(np.linalg.norm(diff)) / robot_length


def record_trial(shape: GroundTruthShape, settings: SweepSettings, seed: int,
                 offset_age_s: float | None = None) -> TrialLog:
    """Sample, corrupt and log one trial on ``shape``."""
    if offset_age_s is None:
        age_rng = rng_stream(seed, "offset-age")
        offset_age_s = max(0.0, float(age_rng.normal(settings.offset_age_s, settings.age_jitter_s))) \
            if settings.age_jitter_s > 0 else settings.offset_age_s
    ideal = sample_ideal_imu_frames(shape, settings.geometry)
    geom = settings.geometry.with_imus(len(ideal))
    cfg = TrialConfig(geom, settings.drift, offset_age_s, shape, seed)
    snapshot, measured = corrupt_samples(ideal, cfg)
    return TrialLog(shape, geom, snapshot, measured, shape.material_length, seed, offset_age_s)


def reconstruct_log(log: TrialLog, k: int = 1, strict: bool = False,
                    arc_samples: int | None = None) -> tuple[CenterlinePolyline, np.ndarray, float]:
    """Reconstruct a logged trial using IMUs ``0, k, 2k, ...`` only.

    The tip estimate extends the last reconstructed IMU by whatever robot
    length lies beyond it (see :func:`extrapolate_tip`). Returns the centerline,
    the estimated tip and the tip error in percent of robot length.
    """
    if k < 1:
        raise ValueError("spacing multiple must be >= 1")
    keep = list(range(0, log.geometry.num_imus, k))
    if len(keep) < 2:
        raise ValueError(f"spacing multiple {k} leaves fewer than 2 IMUs")
    table = compute_offsets(log.snapshot, log.geometry.num_imus).decimate(k)
    by_index = {s.imu_index: s for s in log.measured}
    measured = [replace(by_index[j], imu_index=n) for n, j in enumerate(keep)]
    geom = log.geometry.decimated(k)
    rotations = corrected_relative_rotations(measured, table)
    rec = reconstruct(rotations, geom, log.shape.base, arc_samples, strict)
    beyond = log.robot_length - (geom.num_imus - 1) * geom.spacing_s
    tip = extrapolate_tip(rec, rotations[-1], geom, beyond)
    return rec, tip, tip_error_percent(tip, log.shape.tip.position, log.robot_length)


def extrapolate_tip(rec: CenterlinePolyline, last_rotation: Quat, geom: RobotGeometry,
                    beyond: float) -> np.ndarray:
    """Tip position ``beyond`` cm of material past the last IMU.

    The unsensed stub is assumed to keep bending like the last segment, with
    the bend angle scaled by ``beyond / s``.
    """
    if beyond <= 1e-9:
        return rec.tip.position
    frac = beyond / geom.spacing_s
    aa = quat_to_axis_angle(last_rotation)
    partial = Quat.from_axis_angle(aa.axis, aa.angle * frac)
    stub = segment_from_rotation(partial, replace(geom, spacing_s=beyond))
    end, _ = advance_pose(rec.tip, stub)
    return end.position


def _sweep(kind: str, values: Sequence[float], trials: int, settings: SweepSettings,
           shape_for) -> tuple[list[ExperimentRecord], RegressionSummary | None, list[TrialLog]]:
    if not values:
        raise ValueError("sweep needs at least one value")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    records, logs = [], []
    index = 0
    for value in values:
        for t in range(trials):
            seed = trial_seed(settings.master_seed, kind, index)
            shape = shape_for(value)
            log = record_trial(shape, settings, seed)
            _, _, err = reconstruct_log(log, 1, settings.strict, settings.arc_samples)
            records.append(ExperimentRecord(float(value), err, seed, {
                "trial": index, "repeat": t, "offset_age_s": round(log.offset_age_s, 6),
                "num_imus": log.geometry.num_imus,
            }))
            logs.append(log)
            index += 1
    return records, _fit_records(records), logs


def _fit_records(records: Sequence[ExperimentRecord]) -> RegressionSummary | None:
    xs = [r.independent_var for r in records]
    if len(records) < 3 or len(set(xs)) < 2:
        return None
    return ols_fit(xs, [r.tip_error_pct for r in records])


def passive_shape(angle: float, settings: SweepSettings) -> GroundTruthShape:
    geom, length = settings.geometry, settings.length
    if settings.passive_shape == "hinge":
        return _hinge_passive(angle, settings)
    radius = settings.bend_radius if settings.bend_radius is not None else geom.diameter_d / 2.0
    shape = make_passive_bend_shape(settings.pre_length, angle, radius,
                                    max(length, settings.pre_length + radius * math.radians(angle)),
                                    edge_offset=settings.edge_offset)
    return shape.truncated_material(min(length, shape.material_length))


def _hinge_passive(angle: float, settings: SweepSettings) -> GroundTruthShape:
    # the plank bend spread evenly over as few hinge segments as can hold it
    geom = settings.geometry
    n_seg = math.floor(settings.length / geom.spacing_s + 1e-9)
    phi = math.radians(angle)
    m = max(1, math.ceil(phi / geom.max_bend - 1e-12))
    first = min(max(0, round(settings.pre_length / geom.spacing_s)), max(0, n_seg - m))
    bends = [(phi / m if first <= j < first + m else 0.0, (0.0, 0.0, 1.0)) for j in range(n_seg)]
    shape = make_hinge_shape(bends, geom)
    shape.description = f"hinge passive bend {angle:g} deg"
    return shape


def active_shape(kappa: float, settings: SweepSettings) -> GroundTruthShape:
    length = settings.length
    shape = make_constant_curvature_shape(kappa, length, edge_offset=settings.edge_offset)
    return shape.truncated_material(min(length, shape.material_length)) if kappa > 0 else shape


def grown_shape(length: float, settings: SweepSettings) -> GroundTruthShape:
    shape = make_constant_curvature_shape(settings.growth_kappa, length, edge_offset=settings.edge_offset)
    return shape.truncated_material(min(length, shape.material_length)) if settings.growth_kappa > 0 else shape


def run_passive_sweep(angles: Sequence[float] = PASSIVE_ANGLES, trials_per_angle: int = 2,
                      settings: SweepSettings = SweepSettings()):
    return _sweep("passive", angles, trials_per_angle, settings, lambda a: passive_shape(a, settings))


def run_active_sweep(kappas: Sequence[float] = ACTIVE_KAPPAS, trials: int = 1,
                     settings: SweepSettings = SweepSettings(offset_age_s=87.0, bend_radius_factor=2.0)):
    return _sweep("active", kappas, trials, settings, lambda k: active_shape(k, settings))


def run_length_sweep(lengths: Sequence[float] = LENGTHS, trials: int = 1,
                     settings: SweepSettings = SweepSettings(offset_age_s=41.0)):
    for length in lengths:
        if length < settings.geometry.spacing_s:
            raise ValueError(f"length {length} cm holds fewer than 2 IMUs")
    return _sweep("length", lengths, trials, settings, lambda L: grown_shape(L, settings))


@dataclass
class SpacingResult:
    records: list[ExperimentRecord]
    best_spacing: dict[int, float]


def run_spacing_sweep(base_trials: Sequence[TrialLog], spacing_multiples: Sequence[int] = SPACING_MULTIPLES,
                      strict: bool = False, arc_samples: int | None = None) -> SpacingResult:
    """Re-run logged trials keeping only every ``k``-th IMU.

    Multiples that would leave fewer than two IMUs on a trial are skipped for
    that trial.
    """
    records = []
    best: dict[int, float] = {}
    for t, log in enumerate(base_trials):
        errors = {}
        for k in sorted(set(spacing_multiples)):
            if (log.geometry.num_imus - 1) // k < 1:
                continue
            _, _, err = reconstruct_log(log, k, strict, arc_samples)
            spacing = k * log.geometry.spacing_s
            errors[spacing] = err
            records.append(ExperimentRecord(spacing, err, log.trial_seed, {"trial": t, "k": k}))
        if not errors:
            raise ValueError(f"trial {t}: no spacing multiple leaves 2 IMUs")
        best[t] = min(errors, key=lambda s: (errors[s], s))
    return SpacingResult(records, best)


def run_drift_experiment(n_sensors: int = 15, duration_s: float = 600.0, model: DriftModel = DriftModel(),
                         sample_every_s: float = 10.0) -> tuple[list[DriftSample], RegressionSummary]:
    """Stationary sensors read repeatedly after an initial offset.

    Error is the angle between each reading and that sensor's reading at time
    zero; the pooled fit is error (deg) against time (min).
    """
    if not duration_s > 0 or not sample_every_s > 0:
        raise ValueError("duration_s and sample_every_s must be > 0")
    if n_sensors < 1:
        raise ValueError("n_sensors must be >= 1")
    steps = int(math.floor(duration_s / sample_every_s + 1e-9))
    times = [k * sample_every_s for k in range(steps + 1)]
    samples = []
    for i, (rate, axis) in enumerate(sample_sensor_rates(model, n_sensors)):
        start = apply_drift(Quat.identity(), rate, axis, 0.0, model.noise_std,
                            rng_stream(model.seed, i, "drift-exp", 0))
        for k, t in enumerate(times[1:], start=1):
            q = apply_drift(Quat.identity(), rate, axis, t, model.noise_std,
                            rng_stream(model.seed, i, "drift-exp", k), walk_std=model.walk_std)
            samples.append(DriftSample(i, t, math.degrees(angle_between(start, q))))
    summary = ols_fit([s.time_s / 60.0 for s in samples], [s.error_deg for s in samples])
    return samples, summary


def mean_error(records: Sequence[ExperimentRecord]) -> float:
    return float(np.mean([r.tip_error_pct for r in records])) if records else float("nan")
