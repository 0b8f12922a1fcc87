"""Passive, active and length sweeps under the shipped corruption model.

Tip error is reported as a percentage of the everted length. The active
sweep deliberately puts the material's inextensible edge twice as far from
the centerline as the reconstruction assumes, standing in for pouch motors
that do not bend the way the hinge model expects.

    python3 demos/03_experiment_sweeps.py [output_dir] [seeds]
"""
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from vineshape import io as vio
from vineshape.config import DEFAULT_CONFIG
from vineshape.experiments import run_active_sweep, run_length_sweep, run_passive_sweep
from vineshape.plotting import PlotSpec, render_svg
from vineshape.stats import ols_fit

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
seeds = int(sys.argv[2]) if len(sys.argv) > 2 else 20

pooled = {"passive": [], "active": [], "length": []}
for seed in range(seeds):
    cfg = replace(DEFAULT_CONFIG, seed=seed)
    sw = cfg.sweeps
    pooled["passive"] += run_passive_sweep(sw.passive.angles, sw.passive.trials_per_angle, cfg.settings("passive"))[0]
    pooled["active"] += run_active_sweep(sw.active.kappas, sw.active.trials, cfg.settings("active"))[0]
    pooled["length"] += run_length_sweep(sw.length.lengths, sw.length.trials, cfg.settings("length"))[0]

labels = {"passive": "bend angle (deg)", "active": "curvature (1/cm)", "length": "length (cm)"}
for kind, records in pooled.items():
    xs = [r.independent_var for r in records]
    ys = [r.tip_error_pct for r in records]
    fit = ols_fit(xs, ys)
    print(f"{kind:8s} mean {np.mean(ys):5.2f}%  slope {fit.slope:+.4f}  R^2 {fit.r_squared:.2f}  "
          f"p {fit.p_value:.2g}  ({len(records)} trials, {seeds} seeds)")
    vio.write_results(out / f"03_{kind}.csv", records)
    render_svg(PlotSpec("error-scatter-with-fit", labels[kind], "tip error (%)", f"{kind} sweep",
                        str(out / f"03_{kind}.svg")), {"x": xs, "y": ys, "fit": fit})
print(f"wrote results and plots to {out}")
