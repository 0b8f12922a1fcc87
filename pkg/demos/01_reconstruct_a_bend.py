"""Reconstruct one passively bent robot and compare it with the truth.

A 173.4 cm robot carrying 18 IMUs is pushed against a plank 80 cm from its
base and bends 60 degrees. We take a straight snapshot first, wait 84 s
(enough for the sensors to drift by about two degrees), read the bent
robot, and rebuild its centerline from the relative rotations.

    python3 demos/01_reconstruct_a_bend.py [output_dir]
"""
import sys
from pathlib import Path

import numpy as np

from vineshape.config import DEFAULT_CONFIG
from vineshape.experiments import passive_shape, record_trial, reconstruct_log
from vineshape.plotting import PlotSpec, render_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
settings = DEFAULT_CONFIG.settings("passive")

shape = passive_shape(60.0, settings)
print(f"ground truth: {shape.description}")
print(f"  everted length {shape.material_length:.1f} cm, tip at {np.round(shape.tip.position, 2)}")

# What the sensors report: drift, white noise and mounting misalignment.
log = record_trial(shape, settings, seed=2024, offset_age_s=84.0)
rec, tip, err = reconstruct_log(log)
print(f"reconstructed tip {np.round(tip, 2)}, error {err:.2f}% of length")

# The same trial with perfect sensors shows how much of that is the hinge
# model itself (a plank bend is tighter than one hinge segment can hold).
clean = settings.noiseless()
_, clean_tip, clean_err = reconstruct_log(record_trial(shape, clean, seed=2024, offset_age_s=84.0))
print(f"with ideal sensors the error is {clean_err:.3f}%")

path = out / "01_bend.svg"
render_svg(PlotSpec("centerline-overlay", "x (cm)", "y (cm)", "60 deg plank bend", str(path)), {
    "series": [("truth", shape.polyline(1.0)), ("estimate", np.vstack([rec.points, tip]))],
    "markers": [("IMUs (estimated)", rec.imu_positions)],
})
print(f"wrote {path}")
