import math
from dataclasses import replace

import numpy as np
import pytest

from vineshape.calibration import DriftModel
from vineshape.experiments import (
    ExperimentRecord, SweepSettings, TrialLog, active_shape, extrapolate_tip, grown_shape, mean_error,
    passive_shape, record_trial, reconstruct_log, run_active_sweep, run_drift_experiment,
    run_length_sweep, run_passive_sweep, run_spacing_sweep, tip_error_percent, trial_seed,
)
from vineshape.quaternion import Pose, Quat
from vineshape.reconstruction import RobotGeometry, reconstruct

NOISELESS = SweepSettings().noiseless()


def test_noiseless_settings_have_no_corruption():
    d = NOISELESS.drift
    assert (d.mean_rate, d.rate_spread, d.noise_std, d.walk_std, d.mounting_std) == (0, 0, 0, 0, 0)


def test_trial_seed_is_stable_and_distinct():
    assert trial_seed(0, "passive", 3) == trial_seed(0, "passive", 3)
    seeds = {trial_seed(0, kind, i) for kind in ("passive", "active") for i in range(50)}
    assert len(seeds) == 100


def test_tip_error_percent():
    assert tip_error_percent([3, 4, 0], [0, 0, 0], 50.0) == pytest.approx(10.0)
    with pytest.raises(ValueError):
        tip_error_percent([0, 0, 0], [0, 0, 0], 0.0)


def test_record_rejects_negative_error():
    with pytest.raises(ValueError):
        ExperimentRecord(1.0, -0.1, 0)


@pytest.mark.parametrize("angle", [0.0, 15.0, 45.0, 90.0])
def test_noiseless_hinge_passive_is_exact(angle):
    settings = replace(NOISELESS, passive_shape="hinge")
    log = record_trial(passive_shape(angle, settings), settings, seed=1)
    assert reconstruct_log(log)[2] < 1e-6


def test_noiseless_arc_passive_error_is_model_error_only():
    # a plank bend of radius d/2 is tighter than one hinge segment can hold:
    # the residual is the model's, it does not depend on any sensor error
    log = record_trial(passive_shape(90.0, NOISELESS), NOISELESS, seed=1)
    err = reconstruct_log(log)[2]
    assert 0.0 < err < 1.0


def test_noiseless_sweeps_with_representable_shapes():
    records, fit, logs = run_passive_sweep((0.0, 30.0, 60.0, 90.0), 1, replace(NOISELESS, passive_shape="hinge"))
    assert max(r.tip_error_pct for r in records) < 1e-6
    assert len(logs) == 4 and fit is not None


def test_straight_active_sweep_is_exact():
    records, _, _ = run_active_sweep((0.0,), 3, NOISELESS)
    assert max(r.tip_error_pct for r in records) < 1e-9


def test_active_error_grows_with_bend_radius_mismatch():
    mismatched = replace(NOISELESS, bend_radius_factor=2.0)
    exact = run_active_sweep((0.1,), 1, NOISELESS)[0][0].tip_error_pct
    off = run_active_sweep((0.1,), 1, mismatched)[0][0].tip_error_pct
    assert off > exact


def test_sweep_records_and_determinism():
    settings = SweepSettings(drift=DriftModel(mounting_std=20.0))
    a = run_passive_sweep((15.0, 45.0, 75.0), 2, settings)
    b = run_passive_sweep((15.0, 45.0, 75.0), 2, settings)
    assert [r.tip_error_pct for r in a[0]] == [r.tip_error_pct for r in b[0]]
    assert [r.metadata["trial"] for r in a[0]] == list(range(6))
    assert [r.independent_var for r in a[0]] == [15.0, 15.0, 45.0, 45.0, 75.0, 75.0]
    other = run_passive_sweep((15.0, 45.0, 75.0), 2, replace(settings, master_seed=1))
    assert [r.tip_error_pct for r in a[0]] != [r.tip_error_pct for r in other[0]]


def test_sweep_argument_checks():
    with pytest.raises(ValueError):
        run_passive_sweep((), 1, NOISELESS)
    with pytest.raises(ValueError):
        run_passive_sweep((10.0,), 0, NOISELESS)
    with pytest.raises(ValueError):
        run_length_sweep((5.0,), 1, NOISELESS)


def test_fit_skipped_for_a_single_value():
    _, fit, _ = run_active_sweep((0.05,), 3, NOISELESS)
    assert fit is None


def test_length_sweep_uses_grown_shapes():
    records, _, logs = run_length_sweep((30.0, 90.0, 175.0), 1, NOISELESS)
    assert [round(log.robot_length, 9) for log in logs] == [30.0, 90.0, 175.0]
    assert [log.geometry.num_imus for log in logs] == [3, 9, 18]
    assert max(r.tip_error_pct for r in records) < 0.5


def test_grown_and_active_shape_lengths_are_material():
    s = replace(NOISELESS, growth_kappa=0.05)
    assert grown_shape(100.0, s).material_length == pytest.approx(100.0)
    assert active_shape(0.1, replace(NOISELESS, robot_length=150.0)).material_length == pytest.approx(150.0)


def test_extrapolate_tip_straight_and_zero():
    geom = RobotGeometry(num_imus=3)
    rec = reconstruct([Quat(), Quat()], geom)
    assert np.allclose(extrapolate_tip(rec, Quat(), geom, 5.0), [25.4, 0, 0])
    assert np.allclose(extrapolate_tip(rec, Quat(), geom, 0.0), rec.tip.position)


def test_extrapolate_tip_continues_constant_bend():
    # a hinge chain continued by a partial segment bends the same way
    geom = RobotGeometry(num_imus=3)
    r = Quat.from_axis_angle((0, 0, 1), 0.3)
    rec = reconstruct([r, r], geom)
    tip = extrapolate_tip(rec, r, geom, 10.2)
    full = reconstruct([r, r, r], geom.with_imus(4))
    assert np.allclose(tip, full.tip.position, atol=1e-9)


def test_spacing_sweep_arg_min_and_tie_break():
    settings = SweepSettings(drift=DriftModel(mounting_std=20.0))
    logs = [record_trial(passive_shape(a, settings), settings, trial_seed(0, "t", i))
            for i, a in enumerate((30.0, 60.0, 90.0))]
    res = run_spacing_sweep(logs, (1, 2, 4, 16))
    assert set(res.best_spacing) == {0, 1, 2}
    for t in range(3):
        mine = {r.independent_var: r.tip_error_pct for r in res.records if r.metadata["trial"] == t}
        assert res.best_spacing[t] == min(mine, key=lambda s: (mine[s], s))
    # k = 16 leaves two IMUs on an 18-IMU robot; k = 17 or more is skipped
    assert {r.metadata["k"] for r in res.records} == {1, 2, 4, 16}
    noiseless = [record_trial(active_shape(0.0, NOISELESS), NOISELESS, 1)]
    # all errors are zero: the tie goes to the densest spacing
    assert run_spacing_sweep(noiseless, (1, 2, 4)).best_spacing[0] == pytest.approx(10.2)


def test_spacing_decimation_matches_sparser_geometry():
    # decimating a straight-robot hinge trial by k equals a robot built with spacing k*s
    settings = replace(NOISELESS, passive_shape="hinge")
    log = record_trial(passive_shape(0.0, settings), settings, 1)
    for k in (1, 2, 4, 8, 16):
        rec, tip, err = reconstruct_log(log, k)
        assert err < 1e-9
        assert len(rec.imu_indices) == (17 // k) + 1
    with pytest.raises(ValueError):
        reconstruct_log(log, 40)


def test_drift_experiment_exact_rate():
    samples, fit = run_drift_experiment(5, 300.0, DriftModel(1.33, 0.0, 0.0))
    assert fit.slope == pytest.approx(1.33, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert len(samples) == 5 * 30
    assert samples[0].time_s == 10.0 and samples[-1].time_s == 300.0


def test_drift_experiment_validation():
    with pytest.raises(ValueError):
        run_drift_experiment(0)
    with pytest.raises(ValueError):
        run_drift_experiment(3, duration_s=0.0)


def test_mean_error():
    assert math.isnan(mean_error([]))
    assert mean_error([ExperimentRecord(0, 1.0, 0), ExperimentRecord(0, 3.0, 0)]) == 2.0


def test_settings_validation():
    with pytest.raises(ValueError):
        SweepSettings(offset_age_s=-1)
    with pytest.raises(ValueError):
        SweepSettings(passive_shape="zigzag")
    with pytest.raises(ValueError):
        SweepSettings(bend_radius_factor=0)
    assert SweepSettings(bend_radius_factor=2).edge_offset == pytest.approx(12.9)
