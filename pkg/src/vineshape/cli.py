"""``vineshape`` command line.

Commands::

    vineshape simulate {straight,passive,active} [--value X] --out DIR
    vineshape offsets --snapshot SNAP.csv --out DIR
    vineshape reconstruct --log LOG.csv --snapshot SNAP.csv --out DIR
    vineshape sweep {drift,passive,active,length,spacing} --config CFG.json --out DIR
    vineshape plot {centerline,scatter,drift} INPUT.csv [INPUT.csv ...] --out DIR

Every command takes ``--config``, ``--seed``, ``--out``, ``--strict`` and
``--no-timestamp``. Outputs depend only on the config, the input files and
the master seed; the one exception is the ``generated_at`` stamp, which
``--no-timestamp`` switches off.

Exit status is 0 on success, 1 for bad input (config, CSV or geometry) and
2 for command-line usage errors.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io as vio
from .calibration import MalformedSnapshot, compute_offsets, corrected_relative_rotations
from .config import ConfigError, RunConfig, load_config
from .experiments import (
    SweepSettings, active_shape, extrapolate_tip, mean_error, passive_shape, record_trial, run_active_sweep,
    run_drift_experiment, run_length_sweep, run_passive_sweep, run_spacing_sweep, trial_seed,
)
from .plotting import PlotSpec, render_svg
from .reconstruction import BendExceedsSegment, CenterlinePolyline, reconstruct
from .simulation import InvalidShape, _mix, imu_positions
from .stats import ols_fit

SWEEP_KINDS = ("drift", "passive", "active", "length", "spacing")

_X_LABELS = {
    "passive": "bend angle (deg)",
    "active": "curvature (1/cm)",
    "length": "robot length (cm)",
    "spacing": "sensor spacing (cm)",
}


class CliError(Exception):
    """Reported as ``error: <message>`` with exit status 1."""


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--strict", action="store_true", help="fail on bends larger than s/d instead of clamping")
    p.add_argument("--no-timestamp", action="store_true", help="omit the generated_at stamp")


def _geometry_flags(p: argparse.ArgumentParser):
    p.add_argument("--spacing", type=float, help="IMU spacing s in cm")
    p.add_argument("--diameter", type=float, help="robot diameter d in cm")
    p.add_argument("--num-imus", type=int, help="number of IMUs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vineshape", description="IMU-based vine robot shape reconstruction")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic IMU log, snapshot and true centerline")
    p.add_argument("shape", choices=("straight", "passive", "active"))
    p.add_argument("--value", type=float, default=0.0,
                   help="bend angle in degrees (passive) or curvature in 1/cm (active)")
    p.add_argument("--ideal", action="store_true", help="no drift, noise or misalignment")
    _geometry_flags(p)
    _common(p)

    p = sub.add_parser("offsets", help="offset table from a straight snapshot")
    p.add_argument("--snapshot", required=True)
    _geometry_flags(p)
    _common(p)

    p = sub.add_parser("reconstruct", help="centerline from an IMU log and a straight snapshot")
    p.add_argument("--log", required=True, help="IMU log CSV")
    p.add_argument("--snapshot", required=True, help="straight snapshot CSV")
    p.add_argument("--time", type=float, help="log timestamp to reconstruct (default: latest)")
    p.add_argument("--robot-length", type=float, help="extend to this material length past the last IMU")
    _geometry_flags(p)
    _common(p)

    p = sub.add_parser("sweep", help="run one of the simulated experiments")
    p.add_argument("kind", choices=SWEEP_KINDS)
    _common(p)

    p = sub.add_parser("plot", help="render SVG plots from CSV files written by this tool")
    p.add_argument("kind", choices=("centerline", "scatter", "drift"))
    p.add_argument("inputs", nargs="+")
    p.add_argument("--name", default=None, help="output file name (default: <kind>.svg)")
    _common(p)
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    if args.strict:
        cfg = replace(cfg, strict=True)
    geom_kw = {k: v for k, v in (("spacing_s", getattr(args, "spacing", None)),
                                 ("diameter_d", getattr(args, "diameter", None)),
                                 ("num_imus", getattr(args, "num_imus", None))) if v is not None}
    if geom_kw:
        try:
            cfg = replace(cfg, geometry=replace(cfg.geometry, **geom_kw))
        except ValueError as exc:
            raise CliError(f"geometry: {exc}") from None
    return cfg


def _stamp(args) -> str | None:
    if args.no_timestamp:
        return None
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def cmd_simulate(args, cfg: RunConfig, out: Path, stamp):
    settings = SweepSettings(geometry=cfg.geometry, drift=cfg.drift, master_seed=cfg.seed, strict=cfg.strict)
    if args.ideal:
        settings = settings.noiseless()
    try:
        if args.shape == "passive":
            shape = passive_shape(args.value, replace(settings, **_passive_kw(cfg)))
        elif args.shape == "active":
            shape = active_shape(args.value, replace(settings, bend_radius_factor=cfg.sweeps.active.bend_radius_factor))
        else:
            shape = active_shape(0.0, settings)
    except (InvalidShape, ValueError) as exc:
        raise CliError(str(exc)) from None
    seed = trial_seed(cfg.seed, "simulate", 0)
    log = record_trial(shape, settings, seed, offset_age_s=0.0 if args.ideal else None)
    vio.write_imu_log(out / "snapshot.csv", log.snapshot, stamp)
    vio.write_imu_log(out / "imu_log.csv", log.measured, stamp)
    pos = imu_positions(shape, log.geometry)
    line = CenterlinePolyline(shape.polyline(0.5), [], shape.tip)
    vio.write_centerline(out / "truth_centerline.csv", line, stamp)
    vio.write_summary(out / "simulate.json", {
        "shape": shape.description, "trial_seed": seed, "offset_age_s": log.offset_age_s,
        "num_imus": log.geometry.num_imus, "material_length_cm": shape.material_length,
        "tip": [float(v) for v in shape.tip.position], "imu_positions": pos.tolist(),
    }, stamp)
    return [out / "snapshot.csv", out / "imu_log.csv", out / "truth_centerline.csv", out / "simulate.json"]


def _passive_kw(cfg: RunConfig) -> dict:
    p = cfg.sweeps.passive
    return {"pre_length": p.pre_length, "bend_radius": p.bend_radius, "passive_shape": p.shape,
            "bend_radius_factor": p.bend_radius_factor}


def _load_frame(path, num_imus=None, time_s=None):
    rows = vio.read_imu_log(path)
    return vio.frame_at(path, rows, time_s, num_imus)


def cmd_offsets(args, cfg: RunConfig, out: Path, stamp):
    n = args.num_imus
    snap = _load_frame(args.snapshot, n)
    try:
        table = compute_offsets(snap, n)
    except MalformedSnapshot as exc:
        raise CliError(f"{args.snapshot}: {exc}") from None
    return [vio.write_offsets(out / "offsets.csv", table, stamp)]


def cmd_reconstruct(args, cfg: RunConfig, out: Path, stamp):
    snap = _load_frame(args.snapshot, args.num_imus)
    n = len(snap)
    current = _load_frame(args.log, n, args.time)
    geom = cfg.geometry.with_imus(n)
    try:
        table = compute_offsets(snap, n)
        rotations = corrected_relative_rotations(current, table)
        rec = reconstruct(rotations, geom, strict=cfg.strict)
    except BendExceedsSegment as exc:
        raise CliError(f"{args.log}: {exc}") from None
    except MalformedSnapshot as exc:
        raise CliError(str(exc)) from None
    for w in rec.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.robot_length is not None:
        beyond = args.robot_length - (n - 1) * geom.spacing_s
        if beyond < -1e-9:
            raise CliError(f"--robot-length {args.robot_length} is shorter than the IMU chain")
        tip = extrapolate_tip(rec, rotations[-1], geom, beyond)
        rec.points = np.vstack([rec.points, tip])
        rec.tip = replace(rec.tip, position=tip)
    csv_path = vio.write_centerline(out / "centerline.csv", rec, stamp)
    svg = out / "centerline.svg"
    render_svg(PlotSpec("centerline-overlay", "x (cm)", "y (cm)", "reconstructed centerline", str(svg)),
               {"series": [("estimate", rec.points)], "markers": [("IMUs", rec.imu_positions)]})
    return [csv_path, svg]


def _write_sweep(out: Path, kind: str, records, fit, stamp, extra=None):
    res = vio.write_results(out / "results.csv", records, stamp)
    summ = vio.write_summary(out / "summary.json", vio.summary_dict(records, fit, extra), stamp)
    svg = out / f"{kind}.svg"
    render_svg(PlotSpec("error-scatter-with-fit", _X_LABELS[kind], "tip error (% of length)", f"{kind} sweep",
                        str(svg)),
               {"x": [r.independent_var for r in records], "y": [r.tip_error_pct for r in records], "fit": fit})
    return [res, summ, svg]


def cmd_sweep(args, cfg: RunConfig, out: Path, stamp):
    sw = cfg.sweeps
    kind = args.kind
    if kind == "drift":
        model = replace(cfg.drift, seed=_mix(cfg.seed, cfg.drift.seed))
        samples, fit = run_drift_experiment(sw.drift.n_sensors, sw.drift.duration_s, model, sw.drift.sample_every_s)
        traces = vio.write_drift_traces(out / "drift_traces.csv", samples, stamp)
        summary = vio.summary_dict(None, fit, {"mean_error_deg": float(np.mean([s.error_deg for s in samples])),
                                               "mean_error_pct": None})
        summ = vio.write_summary(out / "summary.json", summary, stamp)
        svg = out / "drift.svg"
        render_svg(PlotSpec("drift-traces", "time (min)", "orientation error (deg)", "drift", str(svg)),
                   _drift_plot_data(samples, fit))
        return [traces, summ, svg]
    if kind == "passive":
        records, fit, _ = run_passive_sweep(sw.passive.angles, sw.passive.trials_per_angle, cfg.settings("passive"))
    elif kind == "active":
        records, fit, _ = run_active_sweep(sw.active.kappas, sw.active.trials, cfg.settings("active"))
    elif kind == "length":
        records, fit, _ = run_length_sweep(sw.length.lengths, sw.length.trials, cfg.settings("length"))
    else:
        return _spacing(cfg, out, stamp)
    return _write_sweep(out, kind, records, fit, stamp)


def spacing_base_trials(cfg: RunConfig):
    """Single-bend trials (passive angles, then active curvatures) to decimate."""
    sp = cfg.sweeps.spacing
    base = cfg.settings("spacing")
    passive = replace(base, **_passive_kw(cfg))
    active = replace(base, bend_radius_factor=sp.active_bend_radius_factor)
    logs = []
    index = 0
    for value, kind in [(a, "passive") for a in sp.passive_angles] + [(k, "active") for k in sp.active_kappas]:
        for _ in range(sp.trials_per_value):
            seed = trial_seed(cfg.seed, "spacing", index)
            shape = passive_shape(value, passive) if kind == "passive" else active_shape(value, active)
            logs.append(record_trial(shape, base, seed))
            index += 1
    return logs


def _spacing(cfg: RunConfig, out: Path, stamp):
    logs = spacing_base_trials(cfg)
    result = run_spacing_sweep(logs, cfg.sweeps.spacing.multiples, cfg.strict)
    densest = min(r.independent_var for r in result.records)
    best = [result.best_spacing[t] for t in sorted(result.best_spacing)]
    fit = None
    xs = [r.independent_var for r in result.records]
    if len(set(xs)) >= 2 and len(xs) >= 3:
        fit = ols_fit(xs, [r.tip_error_pct for r in result.records])
    extra = {
        "best_spacing_cm": {str(t): s for t, s in sorted(result.best_spacing.items())},
        "fraction_best_above_densest": sum(b > densest for b in best) / len(best),
        "densest_spacing_cm": densest,
        "mean_error_by_spacing": {
            vio.fmt(s): mean_error([r for r in result.records if r.independent_var == s]) for s in sorted(set(xs))
        },
    }
    return _write_sweep(out, "spacing", result.records, fit, stamp, extra)


def _drift_plot_data(samples, fit):
    traces: dict = {}
    for s in samples:
        ts, es = traces.setdefault(s.sensor, ([], []))
        ts.append(s.time_s / 60.0)
        es.append(s.error_deg)
    return {"traces": traces, "fit": fit}


def cmd_plot(args, cfg: RunConfig, out: Path, stamp):
    name = args.name or f"{args.kind}.svg"
    path = out / name
    if args.kind == "centerline":
        series = []
        for p in args.inputs:
            line = vio.read_centerline(p)
            series.append((Path(p).stem, line.points))
        render_svg(PlotSpec("centerline-overlay", "x (cm)", "y (cm)", "centerlines", str(path)), {"series": series})
    elif args.kind == "scatter":
        records = [r for p in args.inputs for r in vio.read_results(p)]
        xs = [r.independent_var for r in records]
        fit = ols_fit(xs, [r.tip_error_pct for r in records]) if len(xs) >= 3 and len(set(xs)) >= 2 else None
        render_svg(PlotSpec("error-scatter-with-fit", "independent variable", "tip error (% of length)", "",
                            str(path)), {"x": xs, "y": [r.tip_error_pct for r in records], "fit": fit})
    else:
        samples = [s for p in args.inputs for s in vio.read_drift_traces(p)]
        fit = None
        if len({s.time_s for s in samples}) >= 2 and len(samples) >= 3:
            fit = ols_fit([s.time_s / 60.0 for s in samples], [s.error_deg for s in samples])
        render_svg(PlotSpec("drift-traces", "time (min)", "orientation error (deg)", "drift", str(path)),
                   _drift_plot_data(samples, fit))
    return [path]


COMMANDS = {
    "simulate": cmd_simulate,
    "offsets": cmd_offsets,
    "reconstruct": cmd_reconstruct,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        out = Path(cfg.output_dir)
        written = COMMANDS[args.command](args, cfg, out, _stamp(args))
    except (CliError, ConfigError, vio.CsvFormatError, MalformedSnapshot, BendExceedsSegment) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
