import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrnoise import SystemParams, g1, g2, g2_excess, g2_regime, j_star, kappa
from kerrnoise.params import current, params_at_current

params_st = st.builds(SystemParams, epsilon=st.floats(-30, 30), f_occ=st.floats(0, 20),
                      gamma_l=st.floats(0.05, 3), gamma_r=st.floats(0.05, 3))


def test_g1_examples(fig3_point):
    assert g1(fig3_point, 0.0) == 1.0
    assert abs(g1(fig3_point, 0.1)) == pytest.approx(0.8395217, abs=1e-7)
    p = SystemParams(epsilon=0.0, f_occ=3.0)
    t = np.linspace(-4, 4, 9)
    assert np.allclose(np.abs(g1(p, t)), np.exp(-np.abs(t)), rtol=1e-15)


def test_g2_examples(fig3_point):
    assert g2(fig3_point, 0.0) == 2.0
    assert g2(SystemParams(epsilon=0.0), math.log(2) / 2) == pytest.approx(1.5, rel=1e-15)
    assert g2(fig3_point, 0.1) == pytest.approx(1.7047966, abs=1e-7)
    assert g2(fig3_point, 200.0) == 1.0


@given(p=params_st)
def test_bunching_value(p):
    assert abs(g2(p, 0.0) - 2.0) <= 1e-12


@given(p=params_st, t=st.floats(1e-6, 30))
def test_bunching_bounds_and_wick(p, t):
    v = g2(p, t)
    assert 1.0 <= v < 2.0
    assert abs((v - 1.0) - abs(g1(p, t)) ** 2) <= 1e-15
    assert g2_excess(p, t) == pytest.approx(abs(g1(p, t)) ** 2, rel=1e-13, abs=1e-300)


@given(p=params_st)
def test_g2_monotone(p):
    t = np.linspace(0, 10, 400)
    v = g2(p, t)
    assert np.all(np.diff(v) <= 0)
    assert np.array_equal(v, g2(p, -t))


SHORT_T = np.linspace(0.0, 0.05, 2001)


def _kappa_grid():
    # F = 2, symmetric: kappa = eps / sqrt(2)
    return [SystemParams(epsilon=k * math.sqrt(2), f_occ=2.0) for k in (5, 7, 10, 14, 20, 40, 80, 400)]


@pytest.mark.xfail(strict=True, reason="bare Gaussian misses the 2 gamma t propagator decay; "
                                       "error ~0.07 at kappa = 5 gamma")
def test_short_time_bare_gaussian_from_kappa_5():
    for p in _kappa_grid():
        k = kappa(p)
        assert np.max(np.abs((g2(p, SHORT_T) - 1) - np.exp(-2 * k * k * SHORT_T ** 2))) < 0.01


def test_short_time_bare_gaussian_deep_regime():
    for p in _kappa_grid():
        k = kappa(p)
        if k >= 60 * p.gamma:
            assert np.max(np.abs((g2(p, SHORT_T) - 1) - np.exp(-2 * k * k * SHORT_T ** 2))) < 0.01


def test_short_time_law_with_leading_corrections():
    """g2 - 1 = exp(-2 kappa^2 t^2 (1 - 2 gamma t/3) - 2 gamma t) + O(t^4)."""
    for p in _kappa_grid():
        k, g = kappa(p), p.gamma
        t = SHORT_T / g
        law = np.exp(-2 * k * k * t * t * (1 - 2 * g * t / 3) - 2 * g * t)
        assert np.max(np.abs((g2(p, t) - 1) - law)) < 1e-3


@pytest.mark.parametrize("eps,f", [(2.0, 2.0), (4.0, 2.0), (1.0, 0.5)])
def test_long_time_exponential_rate(eps, f):
    p = SystemParams(epsilon=eps, f_occ=f)
    k, g = kappa(p), p.gamma
    for t in (3.0 / g, 4.5 / g, 6.0 / g):
        h = 1e-3
        rate = (math.log(g2_excess(p, t + h)) - math.log(g2_excess(p, t - h))) / (2 * h)
        assert rate == pytest.approx(-2 * (k * k / g + g), rel=0.02)


def test_g2_regime_examples():
    assert g2_regime(SystemParams(epsilon=2.0, f_occ=0.01)) == "lorentzian"
    assert g2_regime(SystemParams(epsilon=2.0, f_occ=10.0)) == "gaussian"
    p = params_at_current(j_star(SystemParams(epsilon=2.0)), 2.0)
    assert current(p) == pytest.approx(j_star(p), rel=1e-12)
    assert g2_regime(p) == "crossover"
    assert g2_regime(SystemParams(epsilon=0.0, f_occ=100.0)) == "lorentzian"
