"""Vine robot shape reconstruction from a chain of IMUs.

The pipeline is: a straight snapshot gives per-pair offsets
(:mod:`vineshape.calibration`), corrected relative rotations become hinge
segments that are chained into a centerline (:mod:`vineshape.reconstruction`),
and :mod:`vineshape.simulation` / :mod:`vineshape.experiments` provide
ground-truth shapes, a sensor corruption model and seeded sweeps.
"""
from .calibration import (
    DriftModel, ImuSample, MalformedSnapshot, OffsetTable, apply_drift, compute_offsets,
    corrected_relative_rotations,
)
from .config import ConfigError, RunConfig, load_config
from .experiments import (
    ExperimentRecord, SweepSettings, run_active_sweep, run_drift_experiment, run_length_sweep,
    run_passive_sweep, run_spacing_sweep,
)
from .plotting import PlotSpec, render_svg
from .quaternion import AxisAngle, Pose, Quat, quat_inv, quat_mul, quat_to_axis_angle, axis_angle_to_quat
from .reconstruction import (
    BendExceedsSegment, CenterlinePolyline, RobotGeometry, SegmentShape, reconstruct, segment_from_rotation,
)
from .simulation import GroundTruthShape, make_constant_curvature_shape, make_hinge_shape, make_passive_bend_shape
from .stats import RegressionSummary, ols_fit

__version__ = "0.1.0"
