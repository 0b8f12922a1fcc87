import json
import subprocess
import sys

import numpy as np
import pytest

from vineshape import io as vio
from vineshape.calibration import ImuSample
from vineshape.cli import main
from vineshape.quaternion import Quat


def run(*args):
    return main([*map(str, args), "--no-timestamp"])


@pytest.fixture
def straight_logs(tmp_path):
    assert run("simulate", "straight", "--ideal", "--out", tmp_path / "sim") == 0
    return tmp_path / "sim"


def test_straight_log_reconstructs_to_full_length(straight_logs, tmp_path):
    out = tmp_path / "rec"
    assert run("reconstruct", "--log", straight_logs / "imu_log.csv", "--snapshot",
               straight_logs / "snapshot.csv", "--out", out) == 0
    line = vio.read_centerline(out / "centerline.csv")
    assert np.allclose(line.tip.position, [173.4, 0, 0], atol=1e-9)
    assert (out / "centerline.svg").read_text().startswith("<?xml")


def test_log_equal_to_snapshot_is_straight_despite_noise(tmp_path):
    rng = np.random.default_rng(3)
    noisy = [ImuSample(0.0, i, Quat(*rng.normal(size=4))) for i in range(18)]
    vio.write_imu_log(tmp_path / "snap.csv", noisy)
    vio.write_imu_log(tmp_path / "log.csv", [ImuSample(30.0, s.imu_index, s.orientation) for s in noisy])
    assert run("reconstruct", "--log", tmp_path / "log.csv", "--snapshot", tmp_path / "snap.csv",
               "--out", tmp_path / "out") == 0
    line = vio.read_centerline(tmp_path / "out" / "centerline.csv")
    assert np.allclose(line.tip.position, [173.4, 0, 0], atol=1e-7)


def test_missing_imu_row_exits_nonzero_with_line_number(straight_logs, tmp_path, capsys):
    lines = (straight_logs / "imu_log.csv").read_text().splitlines(keepends=True)
    del lines[5]  # imu_index 4
    broken = tmp_path / "broken.csv"
    broken.write_text("".join(lines))
    code = run("reconstruct", "--log", broken, "--snapshot", straight_logs / "snapshot.csv", "--out", tmp_path / "o")
    err = capsys.readouterr().err
    assert code == 1
    assert "broken.csv:2" in err and "missing imu_index [4]" in err


def test_unparseable_row_reports_line(straight_logs, tmp_path, capsys):
    text = (straight_logs / "snapshot.csv").read_text().replace("\n0,3,", "\n0,3,oops,", 1)
    bad = tmp_path / "bad.csv"
    bad.write_text(text)
    assert run("offsets", "--snapshot", bad, "--out", tmp_path / "o") == 1
    assert "bad.csv:5" in capsys.readouterr().err


def test_offsets_command_round_trips(straight_logs, tmp_path):
    assert run("offsets", "--snapshot", straight_logs / "snapshot.csv", "--out", tmp_path / "o") == 0
    table = vio.read_offsets(tmp_path / "o" / "offsets.csv")
    assert table.num_imus == 18 and all(q.angle < 1e-9 for q in table.offsets)


def test_reconstruct_strict_vs_lenient(tmp_path, capsys):
    big = Quat.from_axis_angle((0, 0, 1), 1.2)
    vio.write_imu_log(tmp_path / "snap.csv", [ImuSample(0.0, i, Quat()) for i in range(3)])
    vio.write_imu_log(tmp_path / "log.csv", [ImuSample(1.0, 0, Quat()), ImuSample(1.0, 1, big),
                                             ImuSample(1.0, 2, big)])
    args = ["reconstruct", "--log", tmp_path / "log.csv", "--snapshot", tmp_path / "snap.csv", "--out", tmp_path / "o"]
    assert run(*args) == 0
    assert "clamped" in capsys.readouterr().err
    assert run(*args, "--strict") == 1
    assert "segment 0" in capsys.readouterr().err


def test_reconstruct_robot_length_extends_tip(straight_logs, tmp_path):
    assert run("reconstruct", "--log", straight_logs / "imu_log.csv", "--snapshot", straight_logs / "snapshot.csv",
               "--robot-length", 180.0, "--out", tmp_path / "o") == 0
    assert np.allclose(vio.read_centerline(tmp_path / "o" / "centerline.csv").tip.position, [180, 0, 0])


def test_sweep_drift_spread_zero(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"drift": {"rate_spread": 0.0, "noise_std": 0.0}}))
    assert run("sweep", "drift", "--config", cfg, "--out", tmp_path / "o") == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["slope"] == pytest.approx(1.33, abs=1e-6)
    assert len(vio.read_drift_traces(tmp_path / "o" / "drift_traces.csv")) == 15 * 60


def test_sweep_passive_zero_corruption(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "drift": {"mean_rate": 0, "rate_spread": 0, "noise_std": 0, "mounting_std": 0},
        "sweeps": {"passive": {"shape": "hinge"}},
    }))
    assert run("sweep", "passive", "--config", cfg, "--out", tmp_path / "o") == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["mean_error_pct"] < 1e-6
    assert set(summary) >= {"mean_error_pct", "slope", "r_squared", "p_value", "n"}
    records = vio.read_results(tmp_path / "o" / "results.csv")
    assert len(records) == summary["n"] == 14


def test_sweep_spacing_reports_arg_min_per_trial(tmp_path):
    assert run("sweep", "spacing", "--out", tmp_path / "o") == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert set(summary["best_spacing_cm"]) == {"0", "1", "2", "3"}
    records = vio.read_results(tmp_path / "o" / "results.csv")
    for t, best in summary["best_spacing_cm"].items():
        errs = {r.independent_var: r.tip_error_pct for r in records if r.metadata["trial"] == int(t)}
        assert best == pytest.approx(min(errs, key=errs.get))


def test_seed_flag_changes_results(tmp_path):
    assert run("sweep", "active", "--seed", 1, "--out", tmp_path / "a") == 0
    assert run("sweep", "active", "--seed", 2, "--out", tmp_path / "b") == 0
    assert (tmp_path / "a" / "results.csv").read_bytes() != (tmp_path / "b" / "results.csv").read_bytes()


def test_timestamp_is_the_only_difference(tmp_path):
    assert main(["sweep", "length", "--out", str(tmp_path / "a")]) == 0
    assert run("sweep", "length", "--out", tmp_path / "b") == 0
    stamped = (tmp_path / "a" / "results.csv").read_text().splitlines()
    assert stamped[0].startswith("# generated_at=")
    assert stamped[1:] == (tmp_path / "b" / "results.csv").read_text().splitlines()
    a = json.loads((tmp_path / "a" / "summary.json").read_text())
    a.pop("generated_at")
    assert a == json.loads((tmp_path / "b" / "summary.json").read_text())


def test_bad_config_is_named(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"drift": {"noise": 1}}))
    assert run("sweep", "drift", "--config", cfg, "--out", tmp_path / "o") == 1
    assert "unknown key 'noise' in drift" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert run("offsets", "--snapshot", tmp_path / "nope.csv", "--out", tmp_path) == 1
    assert "nope.csv" in capsys.readouterr().err


def test_bad_geometry_flag(straight_logs, tmp_path, capsys):
    assert run("offsets", "--snapshot", straight_logs / "snapshot.csv", "--spacing", -1, "--out", tmp_path) == 1
    assert "geometry" in capsys.readouterr().err


def test_plot_commands(tmp_path, straight_logs):
    assert run("sweep", "passive", "--out", tmp_path / "p") == 0
    assert run("sweep", "drift", "--out", tmp_path / "d") == 0
    assert run("plot", "scatter", tmp_path / "p" / "results.csv", "--out", tmp_path / "plots") == 0
    assert run("plot", "drift", tmp_path / "d" / "drift_traces.csv", "--out", tmp_path / "plots") == 0
    assert run("plot", "centerline", straight_logs / "truth_centerline.csv", "--name", "c.svg",
               "--out", tmp_path / "plots") == 0
    assert sorted(p.name for p in (tmp_path / "plots").iterdir()) == ["c.svg", "drift.svg", "scatter.svg"]


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["sweep", "nonsense"])
    assert info.value.code == 2


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "vineshape.cli", "sweep", "active", "--out", str(tmp_path),
                           "--no-timestamp"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "results.csv" in proc.stdout
