import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sps

from vineshape.stats import DegenerateRegression, ols_fit, t_two_sided_p


@pytest.mark.parametrize("seed", range(10))
def test_matches_scipy_linregress(seed):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 100, 30)
    y = 2.0 + 0.05 * x + rng.normal(0, 2, 30)
    fit = ols_fit(x, y)
    ref = sps.linregress(x, y)
    assert math.isclose(fit.slope, ref.slope, rel_tol=1e-10)
    assert math.isclose(fit.intercept, ref.intercept, rel_tol=1e-10, abs_tol=1e-12)
    assert math.isclose(fit.r_squared, ref.rvalue ** 2, rel_tol=1e-10)
    assert math.isclose(fit.p_value, ref.pvalue, rel_tol=1e-8, abs_tol=1e-14)
    assert fit.n == 30


@given(st.floats(-50, 50), st.integers(1, 200))
def test_t_p_value_matches_scipy(t, dof):
    assert math.isclose(t_two_sided_p(t, dof), 2 * sps.t.sf(abs(t), dof), rel_tol=1e-9, abs_tol=1e-15)


def test_p_value_limits():
    assert t_two_sided_p(0.0, 5) == 1.0
    assert t_two_sided_p(math.inf, 5) == 0.0


def test_perfect_line():
    fit = ols_fit([1, 2, 3, 4, 5], [3, 5, 7, 9, 11])
    assert fit.slope == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(1.0)
    assert fit.r_squared == 1.0
    assert fit.p_value == 0.0


def test_constant_y():
    fit = ols_fit([1, 2, 3, 4], [2.5] * 4)
    assert (fit.slope, fit.r_squared, fit.p_value) == (0.0, 0.0, 1.0)


def test_constant_x_raises():
    with pytest.raises(DegenerateRegression):
        ols_fit([3, 3, 3], [1, 2, 3])


@pytest.mark.parametrize("xs, ys", [([1, 2], [1, 2]), ([1, 2, 3], [1, 2]), ([[1, 2, 3]], [[1, 2, 3]])])
def test_bad_shapes(xs, ys):
    with pytest.raises(ValueError):
        ols_fit(xs, ys)


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=3, max_size=40))
def test_r_squared_bounded(points):
    xs, ys = zip(*points)
    if np.ptp(xs) < 1e-6:
        return
    fit = ols_fit(xs, ys)
    assert 0.0 <= fit.r_squared <= 1.0
    assert 0.0 <= fit.p_value <= 1.0


def test_as_dict():
    d = ols_fit([0, 1, 2], [0, 1, 3]).as_dict()
    assert set(d) == {"slope", "intercept", "r_squared", "p_value", "n"}
