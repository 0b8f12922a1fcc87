"""Small, dependency-free SVG plots.

Three kinds are supported, each with its own data shape:

``centerline-overlay``
    ``{"series": [(label, points), ...]}`` where ``points`` is an ``(N, 3)``
    array in cm. The x-y projection is drawn with equal axis scales;
    optional ``"markers": [(label, points), ...]`` draws dots (e.g. IMUs).
``error-scatter-with-fit``
    ``{"x": [...], "y": [...], "fit": RegressionSummary | None}``.
``drift-traces``
    ``{"traces": {sensor: (times, errors)}, "fit": RegressionSummary | None}``.

Output is byte-for-byte deterministic: every coordinate is printed with a
fixed number of decimals and nothing depends on time or dict ordering.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

KINDS = ("centerline-overlay", "error-scatter-with-fit", "drift-traces")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 60


class PlotDataError(ValueError):
    """Data does not match the plot kind."""


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    x_label: str = ""
    y_label: str = ""
    title: str = ""
    path: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotDataError(f"unknown plot kind {self.kind!r}; expected one of {', '.join(KINDS)}")


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick values (1, 2 or 5 times a power of ten) covering ``[lo, hi]``.

    Coverage holds to within ``1e-9`` of a tick step, so an end that sits on a
    grid value up to rounding does not get an extra tick beyond it.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("tick range must be finite")
    if hi < lo:
        lo, hi = hi, lo
    if hi - lo <= 1e-9 * max(1.0, abs(lo), abs(hi)):
        pad = abs(lo) * 0.1 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / max(1, target - 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw * (1 - 1e-12))
    start = math.floor(lo / step + 1e-9) * step
    digits = max(0, 2 - math.floor(math.log10(step)))
    ticks = []
    k = 0
    while True:
        t = start + k * step
        ticks.append(round(t, digits) + 0.0)
        if t >= hi - step * 1e-9:
            break
        k += 1
    return ticks


def _num(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:.10g}"


class _Axes:
    def __init__(self, xlim, ylim, equal=False):
        self.xt = nice_ticks(*xlim)
        self.yt = nice_ticks(*ylim)
        self.x0, self.x1 = self.xt[0], self.xt[-1]
        self.y0, self.y1 = self.yt[0], self.yt[-1]
        self.pw = WIDTH - MARGIN_L - MARGIN_R
        self.ph = HEIGHT - MARGIN_T - MARGIN_B
        self.sx = self.pw / (self.x1 - self.x0)
        self.sy = self.ph / (self.y1 - self.y0)
        if equal:
            s = min(self.sx, self.sy)
            self.sx = self.sy = s

    def px(self, x):
        return MARGIN_L + (x - self.x0) * self.sx

    def py(self, y):
        return MARGIN_T + self.ph - (y - self.y0) * self.sy


def _frame(ax: _Axes, plot: PlotSpec) -> list[str]:
    out = [f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{ax.pw}" height="{ax.ph}" '
           'fill="none" stroke="#000000" stroke-width="1"/>']
    bottom = MARGIN_T + ax.ph
    for t in ax.xt:
        x = ax.px(t)
        if x > MARGIN_L + ax.pw + 0.5:
            continue
        out.append(f'<line x1="{_num(x)}" y1="{bottom}" x2="{_num(x)}" y2="{bottom + 5}" stroke="#000000"/>')
        out.append(f'<text x="{_num(x)}" y="{bottom + 18}" font-size="11" text-anchor="middle">'
                   f'{_label(t)}</text>')
    for t in ax.yt:
        y = ax.py(t)
        if y < MARGIN_T - 0.5:
            continue
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{_num(y)}" x2="{MARGIN_L}" y2="{_num(y)}" stroke="#000000"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{_num(y + 4)}" font-size="11" text-anchor="end">'
                   f'{_label(t)}</text>')
    if plot.x_label:
        out.append(f'<text x="{_num(MARGIN_L + ax.pw / 2)}" y="{HEIGHT - 15}" font-size="13" '
                   f'text-anchor="middle">{escape(plot.x_label)}</text>')
    if plot.y_label:
        cy = MARGIN_T + ax.ph / 2
        out.append(f'<text x="18" y="{_num(cy)}" font-size="13" text-anchor="middle" '
                   f'transform="rotate(-90 18 {_num(cy)})">{escape(plot.y_label)}</text>')
    if plot.title:
        out.append(f'<text x="{WIDTH // 2}" y="24" font-size="15" text-anchor="middle">{escape(plot.title)}</text>')
    return out


def _legend(entries: Sequence[tuple[str, str, str]]) -> list[str]:
    """``entries`` are ``(label, colour, style)`` with style ``line`` or ``dot``."""
    out = []
    x, y = MARGIN_L + 12, MARGIN_T + 16
    for i, (label, colour, style) in enumerate(entries):
        yy = y + 16 * i
        if style == "line":
            out.append(f'<line x1="{x}" y1="{yy - 4}" x2="{x + 20}" y2="{yy - 4}" stroke="{colour}" stroke-width="2"/>')
        else:
            out.append(f'<circle cx="{x + 10}" cy="{yy - 4}" r="3" fill="{colour}"/>')
        out.append(f'<text x="{x + 26}" y="{yy}" font-size="11">{escape(label)}</text>')
    return out


def _polyline(ax: _Axes, xs, ys, colour: str, dashed: bool = False) -> str:
    pts = " ".join(f"{_num(ax.px(x))},{_num(ax.py(y))}" for x, y in zip(xs, ys))
    dash = ' stroke-dasharray="6 4"' if dashed else ""
    return f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="2"{dash}/>'


def _limits(values: Sequence[float], default=(0.0, 1.0)):
    vals = [float(v) for v in values]
    if not vals:
        return default
    return min(vals), max(vals)


def _as_points(label, pts) -> np.ndarray:
    arr = np.asarray(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3) or len(arr) == 0:
        raise PlotDataError(f"series {label!r}: expected an (N, 3) array of points")
    if not np.all(np.isfinite(arr)):
        raise PlotDataError(f"series {label!r}: non-finite coordinates")
    return arr


def _centerline(plot: PlotSpec, data: dict) -> list[str]:
    series = [(str(lbl), _as_points(lbl, pts)) for lbl, pts in data.get("series", [])]
    markers = [(str(lbl), _as_points(lbl, pts)) for lbl, pts in data.get("markers", [])]
    if not series:
        raise PlotDataError("centerline-overlay needs at least one series")
    allpts = np.vstack([p[:, :2] for _, p in series + markers])
    xlim = _limits(allpts[:, 0])
    ylim = _limits(allpts[:, 1])
    ax = _Axes(xlim, ylim, equal=True)
    out = _frame(ax, plot)
    legend = []
    for i, (lbl, pts) in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        out.append(_polyline(ax, pts[:, 0], pts[:, 1], colour, dashed=i > 0))
        legend.append((lbl, colour, "line"))
    for j, (lbl, pts) in enumerate(markers):
        colour = PALETTE[(len(series) + j) % len(PALETTE)]
        for x, y in pts[:, :2]:
            out.append(f'<circle cx="{_num(ax.px(x))}" cy="{_num(ax.py(y))}" r="3" fill="{colour}"/>')
        legend.append((lbl, colour, "dot"))
    return out + _legend(legend)


def _fit_line(ax: _Axes, fit, colour="#d62728") -> list[str]:
    if fit is None:
        return []
    xs = [ax.x0, ax.x1]
    ys = [fit.intercept + fit.slope * x for x in xs]
    return [_polyline(ax, xs, ys, colour, dashed=True)]


def _fit_label(fit) -> str:
    return f"fit: slope {fit.slope:.4g}, R2 {fit.r_squared:.3f}, p {fit.p_value:.3g}"


def _scatter(plot: PlotSpec, data: dict) -> list[str]:
    if "x" not in data or "y" not in data:
        raise PlotDataError("error-scatter-with-fit needs 'x' and 'y'")
    xs = [float(v) for v in data["x"]]
    ys = [float(v) for v in data["y"]]
    if len(xs) != len(ys):
        raise PlotDataError("'x' and 'y' differ in length")
    if not all(math.isfinite(v) for v in xs + ys):
        raise PlotDataError("non-finite values in scatter data")
    fit = data.get("fit")
    xlim = _limits(xs)
    ylo, yhi = _limits(ys)
    ax = _Axes(xlim, (min(0.0, ylo), yhi))
    out = _frame(ax, plot)
    out.append('<clipPath id="plot-area"><rect x="%d" y="%d" width="%d" height="%d"/></clipPath>'
               % (MARGIN_L, MARGIN_T, ax.pw, ax.ph))
    for x, y in zip(xs, ys):
        out.append(f'<circle cx="{_num(ax.px(x))}" cy="{_num(ax.py(y))}" r="3" fill="{PALETTE[0]}"/>')
    legend = [("trials", PALETTE[0], "dot")] if xs else []
    if fit is not None:
        out.append('<g clip-path="url(#plot-area)">')
        out += _fit_line(ax, fit)
        out.append("</g>")
        legend.append((_fit_label(fit), "#d62728", "line"))
    return out + _legend(legend)


def _drift(plot: PlotSpec, data: dict) -> list[str]:
    if "traces" not in data:
        raise PlotDataError("drift-traces needs 'traces'")
    traces = {}
    for sensor, tr in data["traces"].items():
        try:
            ts, es = tr
        except (TypeError, ValueError):
            raise PlotDataError(f"trace {sensor!r}: expected (times, errors)") from None
        ts, es = [float(v) for v in ts], [float(v) for v in es]
        if len(ts) != len(es):
            raise PlotDataError(f"trace {sensor!r}: times and errors differ in length")
        traces[sensor] = (ts, es)
    fit = data.get("fit")
    all_t = [t for ts, _ in traces.values() for t in ts]
    all_e = [e for _, es in traces.values() for e in es]
    ylo, yhi = _limits(all_e)
    ax = _Axes(_limits(all_t), (min(0.0, ylo), yhi))
    out = _frame(ax, plot)
    out.append('<clipPath id="plot-area"><rect x="%d" y="%d" width="%d" height="%d"/></clipPath>'
               % (MARGIN_L, MARGIN_T, ax.pw, ax.ph))
    legend = []
    for i, sensor in enumerate(sorted(traces, key=str)):
        ts, es = traces[sensor]
        colour = PALETTE[i % len(PALETTE)]
        if ts:
            out.append(_polyline(ax, ts, es, colour))
        if i < 6:
            legend.append((f"sensor {sensor}", colour, "line"))
    if len(traces) > 6:
        legend.append((f"... {len(traces) - 6} more", "#7f7f7f", "line"))
    if fit is not None:
        out.append('<g clip-path="url(#plot-area)">')
        out += _fit_line(ax, fit, "#000000")
        out.append("</g>")
        legend.append((_fit_label(fit), "#000000", "line"))
    return out + _legend(legend)


_RENDER = {"centerline-overlay": _centerline, "error-scatter-with-fit": _scatter, "drift-traces": _drift}


def render_svg(plot: PlotSpec, data: dict) -> str:
    """SVG document text; also written to ``plot.path`` when set."""
    if not isinstance(data, dict):
        raise PlotDataError("plot data must be a dict")
    body = _RENDER[plot.kind](plot, data)
    doc = "\n".join([
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        *body,
        "</svg>",
    ]) + "\n"
    if plot.path:
        path = Path(plot.path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(doc)
    return doc
