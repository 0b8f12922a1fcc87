"""CSV and JSON files read and written by the toolkit.

IMU log / snapshot::

    time_s,imu_index,qw,qx,qy,qz

Offset table (first line is a comment)::

    # captured_at=<seconds>
    pair_index,qw,qx,qy,qz

Centerline (tip pose as a trailing comment row)::

    point_index,x_cm,y_cm,z_cm,is_imu
    # tip,x_cm=..,y_cm=..,z_cm=..,qw=..,qx=..,qy=..,qz=..

Sweep results::

    trial,independent_var,tip_error_pct,seed,notes

Drift traces::

    sensor,time_s,error_deg

Floats are written with 12 significant digits. Lines starting with ``#``
are comments; a ``# generated_at=...`` line is only written when a timestamp
is requested.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .calibration import ImuSample, OffsetTable
from .experiments import DriftSample, ExperimentRecord
from .quaternion import Pose, Quat
from .reconstruction import CenterlinePolyline
from .stats import RegressionSummary

IMU_HEADER = ["time_s", "imu_index", "qw", "qx", "qy", "qz"]
OFFSET_HEADER = ["pair_index", "qw", "qx", "qy", "qz"]
CENTERLINE_HEADER = ["point_index", "x_cm", "y_cm", "z_cm", "is_imu"]
RESULTS_HEADER = ["trial", "independent_var", "tip_error_pct", "seed", "notes"]
DRIFT_HEADER = ["sensor", "time_s", "error_deg"]


class CsvFormatError(ValueError):
    """Malformed input file; ``line`` is 1-based."""

    def __init__(self, path, line: int | None, message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.line = line


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps "\n" endings on every platform
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _rows(path) -> Iterable[tuple[int, list[str]]]:
    """Non-comment, non-blank CSV rows with 1-based line numbers."""
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            yield lineno, next(csv.reader([stripped]))


def _comments(path) -> list[str]:
    with open(path) as fh:
        return [line.strip()[1:].strip() for line in fh if line.strip().startswith("#")]


def _expect_header(path, rows, header):
    try:
        lineno, row = next(rows)
    except StopIteration:
        raise CsvFormatError(path, None, "file is empty") from None
    if [c.strip() for c in row] != header:
        raise CsvFormatError(path, lineno, f"expected header {','.join(header)}, got {','.join(row)}")


def _floats(path, lineno, cells, count):
    if len(cells) != count:
        raise CsvFormatError(path, lineno, f"expected {count} columns, got {len(cells)}")
    try:
        values = [float(c) for c in cells]
    except ValueError as exc:
        raise CsvFormatError(path, lineno, str(exc)) from None
    if not all(math.isfinite(v) for v in values):
        raise CsvFormatError(path, lineno, "non-finite value")
    return values


def _stamp(timestamp: str | None) -> str:
    return f"# generated_at={timestamp}\n" if timestamp else ""


# IMU logs

def write_imu_log(path, samples: Sequence[ImuSample], timestamp: str | None = None) -> Path:
    out = _io.StringIO()
    out.write(_stamp(timestamp))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(IMU_HEADER)
    for s in samples:
        q = s.orientation
        w.writerow([fmt(s.time), s.imu_index, fmt(q.w), fmt(q.x), fmt(q.y), fmt(q.z)])
    return _write(path, out.getvalue())


def read_imu_log(path) -> list[tuple[int, ImuSample]]:
    """All rows of an IMU log as ``(line_number, sample)`` pairs."""
    rows = _rows(path)
    _expect_header(path, rows, IMU_HEADER)
    out = []
    for lineno, cells in rows:
        t, idx, qw, qx, qy, qz = _floats(path, lineno, cells, 6)
        if idx != int(idx) or idx < 0:
            raise CsvFormatError(path, lineno, f"imu_index must be a non-negative integer, got {cells[1]}")
        if t < 0:
            raise CsvFormatError(path, lineno, f"time_s must be >= 0, got {cells[0]}")
        try:
            q = Quat(qw, qx, qy, qz)
        except ValueError as exc:
            raise CsvFormatError(path, lineno, str(exc)) from None
        out.append((lineno, ImuSample(t, int(idx), q)))
    if not out:
        raise CsvFormatError(path, None, "no data rows")
    return out


def frame_at(path, rows: list[tuple[int, ImuSample]], time_s: float | None = None,
             num_imus: int | None = None) -> list[ImuSample]:
    """One complete set of samples (one per IMU) from a log.

    Uses the latest timestamp unless ``time_s`` is given. Missing or duplicate
    IMUs are reported with the line range of that timestamp.
    """
    times = sorted({s.time for _, s in rows})
    t = times[-1] if time_s is None else time_s
    frame = [(ln, s) for ln, s in rows if s.time == t]
    if not frame:
        raise CsvFormatError(path, None, f"no rows at time_s={fmt(t)}")
    lines = [ln for ln, _ in frame]
    span = f"lines {min(lines)}-{max(lines)}"
    seen: dict[int, int] = {}
    for ln, s in frame:
        if s.imu_index in seen:
            raise CsvFormatError(path, ln, f"duplicate imu_index {s.imu_index} at time_s={fmt(t)} "
                                           f"(first on line {seen[s.imu_index]})")
        seen[s.imu_index] = ln
    n = num_imus if num_imus is not None else max(seen) + 1
    missing = [i for i in range(n) if i not in seen]
    if missing:
        raise CsvFormatError(path, min(lines), f"missing imu_index {missing} at time_s={fmt(t)} ({span})")
    extra = sorted(i for i in seen if i >= n)
    if extra:
        raise CsvFormatError(path, seen[extra[0]], f"imu_index {extra[0]} out of range for {n} IMUs")
    return sorted((s for _, s in frame), key=lambda s: s.imu_index)


# offsets

def write_offsets(path, table: OffsetTable, timestamp: str | None = None) -> Path:
    out = _io.StringIO()
    out.write(f"# captured_at={fmt(table.captured_at)}\n")
    out.write(_stamp(timestamp))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(OFFSET_HEADER)
    for i, q in enumerate(table.offsets):
        w.writerow([i, fmt(q.w), fmt(q.x), fmt(q.y), fmt(q.z)])
    return _write(path, out.getvalue())


def read_offsets(path) -> OffsetTable:
    captured = None
    for c in _comments(path):
        if c.startswith("captured_at="):
            try:
                captured = float(c.split("=", 1)[1])
            except ValueError:
                raise CsvFormatError(path, 1, f"bad captured_at comment: {c}") from None
    if captured is None:
        raise CsvFormatError(path, 1, "missing '# captured_at=<seconds>' comment")
    rows = _rows(path)
    _expect_header(path, rows, OFFSET_HEADER)
    offsets = []
    for lineno, cells in rows:
        idx, qw, qx, qy, qz = _floats(path, lineno, cells, 5)
        if idx != len(offsets):
            raise CsvFormatError(path, lineno, f"expected pair_index {len(offsets)}, got {cells[0]}")
        offsets.append(Quat(qw, qx, qy, qz))
    if not offsets:
        raise CsvFormatError(path, None, "no offsets")
    return OffsetTable(tuple(offsets), captured)


# centerlines

def write_centerline(path, line: CenterlinePolyline, timestamp: str | None = None) -> Path:
    out = _io.StringIO()
    out.write(_stamp(timestamp))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CENTERLINE_HEADER)
    imus = set(line.imu_indices)
    for i, p in enumerate(line.points):
        w.writerow([i, fmt(p[0]), fmt(p[1]), fmt(p[2]), int(i in imus)])
    tp, tq = line.tip.position, line.tip.orientation
    out.write(f"# tip,x_cm={fmt(tp[0])},y_cm={fmt(tp[1])},z_cm={fmt(tp[2])},"
              f"qw={fmt(tq.w)},qx={fmt(tq.x)},qy={fmt(tq.y)},qz={fmt(tq.z)}\n")
    return _write(path, out.getvalue())


def read_centerline(path) -> CenterlinePolyline:
    rows = _rows(path)
    _expect_header(path, rows, CENTERLINE_HEADER)
    points, imus = [], []
    for lineno, cells in rows:
        idx, x, y, z, is_imu = _floats(path, lineno, cells, 5)
        if idx != len(points):
            raise CsvFormatError(path, lineno, f"expected point_index {len(points)}, got {cells[0]}")
        points.append((x, y, z))
        if is_imu:
            imus.append(len(points) - 1)
    if not points:
        raise CsvFormatError(path, None, "no points")
    tip = Pose(np.array(points[-1]), Quat())
    for c in _comments(path):
        if c.startswith("tip,"):
            kv = dict(part.split("=", 1) for part in c.split(",")[1:])
            tip = Pose(np.array([float(kv["x_cm"]), float(kv["y_cm"]), float(kv["z_cm"])]),
                       Quat(float(kv["qw"]), float(kv["qx"]), float(kv["qy"]), float(kv["qz"])))
    return CenterlinePolyline(np.array(points), imus, tip)


# sweep outputs

def _notes(meta: dict) -> str:
    return ";".join(f"{k}={meta[k]}" for k in sorted(meta))


def write_results(path, records: Sequence[ExperimentRecord], timestamp: str | None = None) -> Path:
    out = _io.StringIO()
    out.write(_stamp(timestamp))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(RESULTS_HEADER)
    for i, r in enumerate(records):
        w.writerow([r.metadata.get("trial", i), fmt(r.independent_var), fmt(r.tip_error_pct),
                    r.trial_seed, _notes({k: v for k, v in r.metadata.items() if k != "trial"})])
    return _write(path, out.getvalue())


def read_results(path) -> list[ExperimentRecord]:
    rows = _rows(path)
    _expect_header(path, rows, RESULTS_HEADER)
    out = []
    for lineno, cells in rows:
        if len(cells) != 5:
            raise CsvFormatError(path, lineno, f"expected 5 columns, got {len(cells)}")
        trial, x, err, seed = _floats(path, lineno, cells[:4], 4)
        meta: dict = {"trial": int(trial)}
        for item in filter(None, cells[4].split(";")):
            k, _, v = item.partition("=")
            meta[k] = _parse_scalar(v)
        out.append(ExperimentRecord(x, err, int(seed), meta))
    return out


def _parse_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def write_drift_traces(path, samples: Sequence[DriftSample], timestamp: str | None = None) -> Path:
    out = _io.StringIO()
    out.write(_stamp(timestamp))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(DRIFT_HEADER)
    for s in samples:
        w.writerow([s.sensor, fmt(s.time_s), fmt(s.error_deg)])
    return _write(path, out.getvalue())


def read_drift_traces(path) -> list[DriftSample]:
    rows = _rows(path)
    _expect_header(path, rows, DRIFT_HEADER)
    out = []
    for lineno, cells in rows:
        sensor, t, err = _floats(path, lineno, cells, 3)
        out.append(DriftSample(int(sensor), t, err))
    return out


def summary_dict(records: Sequence[ExperimentRecord] | None, fit: RegressionSummary | None,
                 extra: dict | None = None) -> dict:
    errors = [r.tip_error_pct for r in records] if records else []
    out = {
        "mean_error_pct": float(np.mean(errors)) if errors else None,
        "slope": fit.slope if fit else None,
        "r_squared": fit.r_squared if fit else None,
        "p_value": fit.p_value if fit else None,
        "n": fit.n if fit else len(errors),
    }
    if extra:
        out.update(extra)
    return out


def write_summary(path, summary: dict, timestamp: str | None = None) -> Path:
    data = dict(summary)
    if timestamp:
        data["generated_at"] = timestamp
    return _write(path, json.dumps(_round_floats(data), indent=2, sort_keys=True) + "\n")


def _round_floats(obj):
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj
