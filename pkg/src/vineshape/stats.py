"""Ordinary least squares with a two-sided slope p-value."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc


class DegenerateRegression(ValueError):
    """All x values are equal, so the slope is undefined."""


@dataclass(frozen=True)
class RegressionSummary:
    slope: float
    intercept: float
    r_squared: float
    p_value: float
    n: int

    def as_dict(self) -> dict:
        return asdict(self)


def t_two_sided_p(t: float, dof: int) -> float:
    """``P(|T| >= |t|)`` for Student's t with ``dof`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    t2 = t * t
    x = dof / (dof + t2)
    if x > 0.5:
        # near t = 0, 1 - x underflows; use the complementary form instead
        p = 1.0 - betainc(0.5, dof / 2.0, t2 / (dof + t2))
    else:
        p = betainc(dof / 2.0, 0.5, x)
    return float(min(1.0, max(0.0, p)))


def ols_fit(xs: Sequence[float], ys: Sequence[float]) -> RegressionSummary:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-D and the same length")
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 points")
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0 or np.ptp(x) == 0.0:
        raise DegenerateRegression("xs are all equal")
    slope = float(dx @ dy) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    ss_res = float(resid @ resid)
    ss_tot = float(dy @ dy)
    # constant y: no variance to explain
    if ss_tot == 0.0:
        return RegressionSummary(slope, float(intercept), 0.0, 1.0, n)
    r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    dof = n - 2
    se = math.sqrt(ss_res / dof / sxx)
    if se == 0.0:
        p = 0.0 if slope != 0.0 else 1.0
    else:
        p = t_two_sided_p(slope / se, dof)
    return RegressionSummary(slope, float(intercept), r2, p, n)
