# -*- coding: utf-8 -*-
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import DataError
from services.estimation_service import (
    CrossCovCurve, LagGrid, cross_cov, cross_cov_curve, estimate_all_levels, estimate_lag,
    hry_curve, hry_lag, max_feasible_level, report_to_dict,
)
from services.ingest_service import returns_from_sample
from services.simulation_service import CirculantSimulator
from spectral.model import ObservationScheme, SpectralModel
from spectral.theory import limit_constant
from wavelets.filters import WaveletFamily, level_filter
from wavelets.transform import modwt

TAU = 2.0 ** -10


def brute_force_rho(r1, r2, h, l, tau):
    """Doble bucle directo sobre la definición con índices k = L_j-1..n-1"""
    n, L = len(r1), len(h)
    w1 = {k: sum(h[p] * r1[k - p] for p in range(L)) for k in range(L - 1, n)}
    w2 = {k: sum(h[p] * r2[k - p] for p in range(L)) for k in range(L - 1, n)}
    total = 0.0
    if l >= 0:
        for k in range(L - 1, n - l):
            total += w1[k] * w2[k + l]
    else:
        for k in range(L - 1, n + l):
            total += w1[k - l] * w2[k]
    return total / (tau * (n - abs(l) - L + 1))


def curve_of(rho, lags=None):
    rho = np.asarray(rho, dtype=float)
    lags = np.arange(-(len(rho) // 2), len(rho) // 2 + 1) if lags is None else np.asarray(lags)
    return CrossCovCurve(level=1, lags=lags, rho=rho, rho_normalized=rho, divisor=1.0)


def test_modwt_of_zeros():
    coeffs = modwt(np.zeros(50), level_filter('la8', 2))
    assert len(coeffs) == 50 - coeffs.L_j + 1
    assert np.all(coeffs.values == 0.0)


def test_modwt_haar_pair():
    a, b = 0.3, -1.1
    coeffs = modwt(np.array([a, b]), level_filter('haar', 1))
    assert coeffs.first_index == 1
    assert coeffs.values[0] == pytest.approx((b - a) / np.sqrt(2.0))


def test_modwt_impulse_reproduces_filter():
    filt = level_filter('la8', 2)
    L_j = filt.L_j
    returns = np.zeros(2 * L_j - 1)
    returns[L_j - 1] = 1.0
    np.testing.assert_allclose(modwt(returns, filt).values, filt.coefficients, atol=1e-15)


def test_modwt_shorter_than_filter():
    with pytest.raises(DataError, match='más corta'):
        modwt(np.zeros(10), level_filter('la20', 1))


@st.composite
def estimator_cases(draw):
    family, j = draw(st.sampled_from([('haar', 1), ('haar', 2), ('la8', 1)]))
    L_j = level_filter(family, j).L_j
    n = draw(st.integers(min_value=L_j + 8, max_value=64))
    values = st.floats(-2.0, 2.0, allow_nan=False)
    r1 = draw(st.lists(values, min_size=n, max_size=n))
    r2 = draw(st.lists(values, min_size=n, max_size=n))
    l = draw(st.integers(min_value=-8, max_value=8))
    return family, j, np.array(r1), np.array(r2), l


@settings(max_examples=200, deadline=None)
@given(estimator_cases())
def test_cross_cov_matches_brute_force(case):
    family, j, r1, r2, l = case
    filt = level_filter(family, j)
    value = cross_cov(modwt(r1, filt), modwt(r2, filt), l, TAU)
    expected = brute_force_rho(r1, r2, filt.coefficients, l, TAU)
    assert value == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_cross_cov_zero_input():
    filt = level_filter('haar', 1)
    w = modwt(np.random.default_rng(0).normal(size=30), filt)
    assert cross_cov(w, modwt(np.zeros(30), filt), 3, TAU) == 0.0


def test_cross_cov_empty_range():
    filt = level_filter('haar', 1)
    w = modwt(np.ones(5), filt)
    with pytest.raises(DataError):
        cross_cov(w, w, 4, TAU)


def test_cross_cov_level_mismatch():
    r = np.ones(40)
    with pytest.raises(DataError):
        cross_cov(modwt(r, level_filter('haar', 1)), modwt(r, level_filter('haar', 2)), 0, TAU)


def test_normalized_curve_is_one_for_identical_inputs(rng):
    w = modwt(rng.normal(size=500), level_filter('la8', 3))
    curve = cross_cov_curve(w, w, LagGrid.from_max_lag(10), TAU)
    assert curve.rho_normalized[10] == 1.0
    assert curve.rho[10] >= 0
    assert np.all(np.abs(curve.rho_normalized) <= 1.0 + 0.1)


def test_curve_mirror_symmetry(rng):
    filt = level_filter('la20', 2)
    w1 = modwt(rng.normal(size=400), filt)
    w2 = modwt(rng.normal(size=400), filt)
    grid = LagGrid.from_max_lag(12)
    forward = cross_cov_curve(w1, w2, grid, TAU)
    backward = cross_cov_curve(w2, w1, grid, TAU)
    np.testing.assert_allclose(forward.rho, backward.rho[::-1], rtol=1e-13)


def test_white_noise_curve_is_small(rng):
    filt = level_filter('la20', 1)
    w1 = modwt(rng.normal(size=15000), filt)
    w2 = modwt(rng.normal(size=15000), filt)
    curve = cross_cov_curve(w1, w2, LagGrid.from_max_lag(60), TAU)
    assert np.max(np.abs(curve.rho_normalized)) < 0.1


def test_estimate_lag_unique_peak():
    estimate = estimate_lag(curve_of([0.1, 0.9, 0.2, 0.0, 0.1, 0.0, 0.3]), TAU)
    assert estimate.lag == -2
    assert estimate.theta_seconds == -2 * TAU
    assert estimate.peak_value == 0.9
    assert estimate.runner_up_gap == pytest.approx(0.6)
    assert not estimate.tie_broken


def test_estimate_lag_negative_peak_counts():
    estimate = estimate_lag(curve_of([0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), TAU)
    assert estimate.lag == -2


def test_estimate_lag_zero_curve_is_degenerate():
    estimate = estimate_lag(curve_of(np.zeros(9)), TAU)
    assert estimate.lag == 0
    assert estimate.degenerate
    assert estimate.tie_broken


def test_estimate_lag_tie_breaks():
    # |ρ| igual en -2 y 2: gana el negativo
    assert estimate_lag(curve_of([0, 0.5, 0, 0, 0, -0.5, 0]), TAU).lag == -2
    # |ρ| igual en -3 y 1: gana el menor |l|
    estimate = estimate_lag(curve_of([0.5, 0, 0, 0, 0.5, 0, 0]), TAU)
    assert estimate.lag == 1
    assert estimate.tie_broken


def test_lag_grid():
    assert LagGrid.from_max_lag(3).lags.tolist() == [-3, -2, -1, 0, 1, 2, 3]
    assert LagGrid.from_delta(3.0, 1.0).l_max == 2
    assert LagGrid.from_delta(3.5, 1.0).l_max == 3
    with pytest.raises(DataError):
        LagGrid(lags=np.array([-1, 0, 2]))


def test_hry_recovers_shift(rng):
    x = rng.normal(size=3000)
    y = np.concatenate((np.zeros(3), x[:-3]))
    estimate = hry_lag(x, y, LagGrid.from_max_lag(10), 1.0)
    assert estimate.lag == 3
    assert estimate.level == 0


def test_hry_zero_series_is_degenerate(rng):
    estimate = hry_lag(rng.normal(size=100), np.zeros(100), LagGrid.from_max_lag(5), 1.0)
    assert estimate.degenerate


def test_max_feasible_level():
    grid = LagGrid.from_max_lag(60)
    assert max_feasible_level(15000, 'la20', grid) == 9
    assert max_feasible_level(15000, 'haar', grid) == 13
    assert max_feasible_level(10, 'la20', grid) == 0


def simulated_returns(R, theta_over_tau, n, seed, kernel='midpoint'):
    model = SpectralModel.from_arrays(13, R, theta_over_tau)
    scheme = ObservationScheme(tau=model.tau, n=n)
    path = CirculantSimulator(model, scheme, kernel=kernel).sample(seed)
    return returns_from_sample(path, scheme), model


def test_estimate_all_levels_is_deterministic_and_consistent():
    (ret1, ret2), model = simulated_returns([0.3, 0.5, 0.7], [-1, -1, -2], 4000, seed=4)
    grid = LagGrid.from_max_lag(30)
    first = estimate_all_levels(ret1, ret2, ['la8'], 3, grid, model.tau)
    second = estimate_all_levels(ret1, ret2, ['la8'], 3, grid, model.tau)
    assert first[WaveletFamily.LA8].lags() == second[WaveletFamily.LA8].lags()

    single = estimate_all_levels(ret1, ret2, ['la8'], 1, grid, model.tau)[WaveletFamily.LA8]
    assert single.estimates[0] == first[WaveletFamily.LA8].estimates[0]


def test_estimate_all_levels_rejects_infeasible_level():
    rng = np.random.default_rng(1)
    r = rng.normal(size=500)
    with pytest.raises(DataError, match='nivel máximo factible: 6'):
        estimate_all_levels(r, r, ['la8'], 7, LagGrid.from_max_lag(10), 1.0)


def test_swapping_series_negates_lags():
    (ret1, ret2), model = simulated_returns([0.0, 0.0, 0.7], [0, 0, -3], 8000, seed=8)
    grid = LagGrid.from_max_lag(20)
    forward = estimate_all_levels(ret1, ret2, ['la20'], 3, grid, model.tau)[WaveletFamily.LA20]
    backward = estimate_all_levels(ret2, ret1, ['la20'], 3, grid, model.tau)[WaveletFamily.LA20]
    assert backward.lags() == [-l for l in forward.lags()]


def test_positive_rescaling_keeps_lags():
    (ret1, ret2), model = simulated_returns([0.5, 0.5], [-1, -2], 3000, seed=2)
    grid = LagGrid.from_max_lag(15)
    base = estimate_all_levels(ret1, ret2, ['haar'], 2, grid, model.tau)[WaveletFamily.HAAR]
    scaled = estimate_all_levels(3.0 * ret1.returns, 0.25 * ret2.returns, ['haar'], 2, grid,
                                 model.tau)[WaveletFamily.HAAR]
    assert base.lags() == scaled.lags()


def test_report_to_dict():
    (ret1, ret2), model = simulated_returns([0.5], [-1], 1000, seed=1)
    grid = LagGrid.from_max_lag(5)
    reports = estimate_all_levels(ret1, ret2, ['haar'], 2, grid, model.tau)
    report = report_to_dict(reports, None, model.tau)
    assert report['schema_version'] == 1
    level = report['families'][0]['levels'][0]
    assert level['j'] == 1
    assert len(level['curve']) == 11
    assert set(level['curve'][0]) == {'l', 'rho', 'rho_norm'}
    assert 'hry' not in report


def test_report_hry_entry_matches_level_entries():
    (ret1, ret2), model = simulated_returns([0.5], [-1], 1000, seed=1)
    grid = LagGrid.from_max_lag(5)
    reports = estimate_all_levels(ret1, ret2, ['haar'], 1, grid, model.tau)
    curve = hry_curve(ret1, ret2, grid)
    report = report_to_dict(reports, (curve, estimate_lag(curve, model.tau)), model.tau)
    level = report['families'][0]['levels'][0]
    assert set(report['hry']) == set(level) - {'j'}
    assert report['hry']['theta_hat_grid'] == hry_lag(ret1, ret2, grid, model.tau).lag


@pytest.mark.slow
def test_converges_to_limit_constant():
    j, R = 3, 0.7
    r = [0.0] * 14
    t = [0.0] * 14
    r[j - 1], t[j - 1] = R, -2
    values = []
    for seed in range(4):
        (ret1, ret2), model = simulated_returns(r, t, 2 ** 17, seed=seed, kernel='exact')
        filt = level_filter('la20', j)
        values.append(cross_cov(modwt(ret1, filt), modwt(ret2, filt), -2, model.tau))
    expected = limit_constant(j, 0.0, 0.0, 0.0, R, 1.0, family='la20')
    assert np.mean(values) == pytest.approx(expected, rel=0.05)
