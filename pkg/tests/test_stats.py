import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats as sps

from brwsim.stats import (
    MomentCurve,
    RatioUndefined,
    TrimUnavailable,
    annealed_moment,
    intermittency_curve,
    intermittency_ratio,
    log_moment_gap,
    log_moment_gap_curve,
    lyapunov_ratio_estimate,
    moments_from_paths,
    shapiro_wilk,
    trim_count,
    trimmed_mean,
)

GRID = np.linspace(0, 10, 101)


def curve(values, n=1):
    values = np.broadcast_to(np.asarray(values, dtype=float), GRID.shape).copy()
    return MomentCurve(GRID, values, n, 1, np.ones(len(GRID), dtype=np.int64))


# -- quenched ---------------------------------------------------------------

def test_single_constant_path():
    c = moments_from_paths(np.ones((1, len(GRID))), 1, GRID)
    assert np.all(c.values == 1.0)


@given(arrays(np.float64, (20, 7), elements=st.floats(0, 1e6)))
def test_jensen(paths):
    m1 = moments_from_paths(paths, 1, np.arange(7)).values
    m2 = moments_from_paths(paths, 2, np.arange(7)).values
    assert np.all(m2 >= m1**2 * (1 - 1e-12))


# -- trimming ---------------------------------------------------------------

def test_trim_counts():
    assert trim_count(250, 0.01) == 2
    assert trim_count(50, 0.01) == 1
    assert trim_count(1000, 0.01) == 5


def test_trimmed_mean_hand_example():
    assert trimmed_mean(np.arange(250), 0.01) == 124.5
    assert trimmed_mean(np.arange(2, 248)) == 124.5


def test_trimmed_mean_drops_two_each_end():
    rng = np.random.default_rng(1)
    x = rng.normal(size=250)
    x[:2] = 1e9
    x[2:4] = -1e9
    assert trimmed_mean(x) == pytest.approx(np.sort(x)[2:248].mean())


@given(st.floats(-1e6, 1e6), st.integers(3, 300))
def test_trimmed_mean_constant(v, n):
    assert trimmed_mean(np.full(n, v)) == pytest.approx(v)


def test_trim_unavailable():
    with pytest.raises(TrimUnavailable):
        trimmed_mean([1.0, 2.0], 0.9)


# -- annealed ---------------------------------------------------------------

def test_identical_curves():
    curves = [curve(np.exp(GRID / 3)) for _ in range(50)]
    for p in (1, 2, 3):
        s = annealed_moment(curves, p)
        np.testing.assert_allclose(s.annealed, np.exp(p * GRID / 3), rtol=1e-12)
    s1 = annealed_moment(curves, 1)
    s2 = annealed_moment(curves, 2)
    np.testing.assert_allclose(intermittency_curve(s1), 1.0, rtol=1e-12)
    np.testing.assert_allclose(log_moment_gap_curve(s1, s2), 0.0, atol=1e-12)
    assert lyapunov_ratio_estimate([s1, s2]) == pytest.approx([1 / 3, 1 / 3])


def test_two_curves_mean():
    s = annealed_moment([curve(5.0), curve(15.0)], 1, trim_fraction=0.0)
    np.testing.assert_allclose(s.annealed, 10.0)


def test_no_overflow_for_huge_moments():
    curves = [curve(1e200), curve(1e180), curve(1e190)]
    s = annealed_moment(curves, 2, trim_fraction=0.0)
    assert np.isinf(s.annealed[0])
    assert s.log_annealed[0] / math.log(10) == pytest.approx(400 - math.log10(3), rel=1e-12)


def test_ratio_heavy_tail():
    vals = [1.0] * 49 + [1000.0]
    s = annealed_moment([curve(v) for v in vals], 1)
    assert s.trimmed_each_end == 1
    assert intermittency_ratio(s, 10.0) == pytest.approx((49 + 1000) / 50)


def test_ratio_undefined_when_trimmed_zero():
    s = annealed_moment([curve(0.0)] * 49 + [curve(1.0)], 1)
    with pytest.raises(RatioUndefined):
        intermittency_ratio(s, 5.0)


def test_gap_requires_p1_p2():
    s = annealed_moment([curve(2.0)], 1, trim_fraction=0.0)
    with pytest.raises(ValueError):
        log_moment_gap(s, s, 1.0)


def test_mismatched_grids():
    other = MomentCurve(GRID[:-1], np.ones(100), 1, 1, np.ones(100))
    with pytest.raises(ValueError):
        annealed_moment([curve(1.0), other])


def test_lyapunov_random_increasing():
    rng = np.random.default_rng(3)
    rates = rng.weibull(2.0, size=50) * 1.2
    curves = [curve(np.exp(r * GRID)) for r in rates]
    r = lyapunov_ratio_estimate([annealed_moment(curves, p) for p in (1, 2, 3)])
    assert r[0] < r[1] < r[2]


def test_lyapunov_single_medium_collapses():
    c = [curve(np.exp(0.7 * GRID + 0.1 * np.sin(GRID)))]
    r = lyapunov_ratio_estimate([annealed_moment(c, p, trim_fraction=0.0) for p in (1, 2, 3)])
    assert r[1] == pytest.approx(r[0]) and r[2] == pytest.approx(r[0])


# -- Shapiro-Wilk -----------------------------------------------------------

@pytest.mark.parametrize("n", [3, 4, 5, 7, 11, 12, 30, 50, 250, 1000, 5000])
def test_shapiro_matches_scipy(n):
    rng = np.random.default_rng(n)
    for x in (rng.normal(size=n), rng.exponential(size=n), rng.uniform(size=n)):
        w, p = shapiro_wilk(x)
        ref = sps.shapiro(x)
        assert w == pytest.approx(ref.statistic, abs=1e-6)
        assert p == pytest.approx(ref.pvalue, abs=1e-6)


def test_shapiro_null_rejection_rate():
    rng = np.random.default_rng(11)
    rej = sum(shapiro_wilk(rng.normal(size=250))[1] < 0.05 for _ in range(1000))
    assert 0.03 <= rej / 1000 <= 0.07


def test_shapiro_skewed():
    rng = np.random.default_rng(12)
    assert shapiro_wilk(rng.exponential(size=250))[1] < 0.001


@pytest.mark.parametrize("x", [np.full(10, 3.0), [1.0, 2.0], np.zeros(5001)])
def test_shapiro_domain(x):
    with pytest.raises(ValueError):
        shapiro_wilk(x)


@settings(max_examples=50)
@given(arrays(np.float64, st.integers(3, 200), elements=st.floats(-1e3, 1e3)))
def test_shapiro_range(x):
    if np.ptp(x) < 1e-6:
        return
    w, p = shapiro_wilk(x)
    assert 0 < w <= 1
    assert 0 <= p <= 1
