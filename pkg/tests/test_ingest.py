# -*- coding: utf-8 -*-
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import IngestError
from services.ingest_service import (
    PriceScale, TickSeries, align_to_grid, common_grid, read_csv, returns_from_sample,
    write_aligned_csv,
)
from services.simulation_service import PathSample
from spectral.model import ObservationScheme


def chi_returns(increments, missing):
    """Δ^o_k = Σ_α χ_k(α) Δ_{k-α}: cero si k+1 falta, si no la suma desde el último punto observado"""
    out = []
    for k in range(len(increments)):
        if missing[k + 1]:
            out.append(0.0)
            continue
        m = k
        total = increments[m]
        while missing[m]:
            m -= 1
            total += increments[m]
        out.append(total)
    return np.array(out)


@st.composite
def masked_paths(draw):
    n = draw(st.integers(min_value=1, max_value=64))
    increments = draw(st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=n, max_size=n))
    missing = [False] + draw(st.lists(st.booleans(), min_size=n, max_size=n))
    return np.array(increments), np.array(missing)


@settings(max_examples=1000, deadline=None)
@given(masked_paths())
def test_previous_tick_matches_chi_expansion(data):
    increments, missing = data
    n = len(increments)
    path = PathSample(increments, increments[::-1].copy(), missing, np.zeros(n + 1, bool), seed=0)
    ret1, ret2 = returns_from_sample(path, ObservationScheme(tau=0.5, n=n))
    np.testing.assert_allclose(ret1.returns, chi_returns(increments, missing), rtol=0, atol=1e-12)
    np.testing.assert_allclose(ret2.returns, increments[::-1], rtol=0, atol=1e-12)
    np.testing.assert_array_equal(ret1.observed, ~missing)


def test_ticks_on_every_grid_point():
    prices = np.array([100.0, 101.0, 99.5, 102.0])
    ticks = TickSeries(np.arange(4.0), prices)
    aligned = align_to_grid(ticks, 0.0, 1.0, 3)
    np.testing.assert_allclose(aligned.returns, np.diff(np.log(prices)))
    assert aligned.observed.all()


def test_missing_grid_point_aggregates():
    ticks = TickSeries(np.array([0.0, 2.0]), np.array([0.25, 1.0]), PriceScale.LOG_PRICE)
    aligned = align_to_grid(ticks, 0.0, 1.0, 2)
    np.testing.assert_allclose(aligned.returns, [0.0, 0.75])
    np.testing.assert_array_equal(aligned.observed, [True, False, True])


def test_last_tick_wins_on_ties():
    ticks = TickSeries(np.array([0.0, 1.0, 1.0]), np.array([0.0, 0.3, 0.5]), PriceScale.LOG_PRICE)
    aligned = align_to_grid(ticks, 0.0, 1.0, 1)
    assert aligned.returns[0] == 0.5


def test_several_ticks_in_one_interval():
    ticks = TickSeries(np.array([0.0, 0.2, 0.7, 0.9, 2.5]), np.array([1.0, 2.0, 3.0, 4.0, 5.0]),
                       PriceScale.LOG_PRICE)
    aligned = align_to_grid(ticks, 0.0, 1.0, 3)
    np.testing.assert_allclose(aligned.returns, [3.0, 0.0, 1.0])
    np.testing.assert_array_equal(aligned.observed, [True, True, False, True])


def test_returns_telescope():
    rng = np.random.default_rng(1)
    times = np.sort(rng.uniform(0, 100, 400))
    prices = np.exp(np.cumsum(rng.normal(0, 0.01, 400))) * 50
    ticks = TickSeries(np.concatenate(([0.0], times)), np.concatenate(([50.0], prices)))
    aligned = align_to_grid(ticks, 0.0, 0.5, 190)
    last = prices[np.searchsorted(times, 95.0, side='right') - 1]
    assert aligned.returns.sum() == pytest.approx(np.log(last) - np.log(50.0))


def test_aligned_series_is_reproduced():
    ticks = TickSeries(np.arange(6.0), np.array([1.0, 1.5, 1.2, 0.7, 0.9, 1.0]), PriceScale.LOG_PRICE)
    first = align_to_grid(ticks, 0.0, 1.0, 5)
    levels = np.concatenate(([1.0], 1.0 + np.cumsum(first.returns)))
    again = align_to_grid(TickSeries(np.arange(6.0), levels, PriceScale.LOG_PRICE), 0.0, 1.0, 5)
    np.testing.assert_allclose(again.returns, first.returns, atol=1e-15)


def test_no_tick_before_origin():
    ticks = TickSeries(np.array([5.0, 6.0]), np.array([1.0, 2.0]))
    with pytest.raises(IngestError):
        align_to_grid(ticks, 4.0, 1.0, 2)


def test_non_positive_grid_length():
    ticks = TickSeries(np.array([0.0]), np.array([1.0]))
    with pytest.raises(IngestError):
        align_to_grid(ticks, 0.0, 1.0, 0)


def test_zero_masks_give_raw_increments():
    increments = np.array([0.1, -0.2, 0.05, 0.3])
    path = PathSample(increments, increments, np.zeros(5, bool), np.zeros(5, bool), seed=0)
    ret1, _ = returns_from_sample(path, ObservationScheme(tau=1.0, n=4))
    np.testing.assert_allclose(ret1.returns, increments, atol=1e-15)


def test_everything_missing_after_origin():
    increments = np.array([0.1, -0.2, 0.05])
    missing = np.array([False, True, True, True])
    path = PathSample(increments, increments, missing, missing, seed=0)
    ret1, ret2 = returns_from_sample(path, ObservationScheme(tau=1.0, n=3))
    assert np.all(ret1.returns == 0.0)
    assert ret2.observed.tolist() == [True, False, False, False]


def test_sample_length_mismatch():
    path = PathSample(np.zeros(3), np.zeros(3), np.zeros(4, bool), np.zeros(4, bool), seed=0)
    with pytest.raises(IngestError):
        returns_from_sample(path, ObservationScheme(tau=1.0, n=5))


def test_read_csv(tmp_path):
    target = tmp_path / 'ticks.csv'
    target.write_text('timestamp,price\n0,100.0\n1.5,100.5\n3,99.0\n', encoding='utf-8')
    ticks = read_csv(str(target))
    assert len(ticks) == 3
    assert ticks.timestamps[1] == 1.5


def test_read_csv_decreasing_timestamp_names_row(tmp_path):
    target = tmp_path / 'ticks.csv'
    target.write_text('timestamp,price\n5,100.0\n4,100.5\n6,99.0\n', encoding='utf-8')
    with pytest.raises(IngestError, match='fila 2'):
        read_csv(str(target))


@pytest.mark.parametrize('content', ['', 'timestamp,price\n'])
def test_read_csv_without_ticks(tmp_path, content):
    target = tmp_path / 'ticks.csv'
    target.write_text(content, encoding='utf-8')
    with pytest.raises(IngestError, match='no hay ticks'):
        read_csv(str(target))


def test_read_csv_non_positive_price(tmp_path):
    target = tmp_path / 'ticks.csv'
    target.write_text('timestamp,price\n0,1.0\n1,0.0\n', encoding='utf-8')
    with pytest.raises(IngestError, match='fila 2'):
        read_csv(str(target))


def test_read_csv_log_prices_may_be_negative(tmp_path):
    target = tmp_path / 'ticks.csv'
    target.write_text('timestamp,price\n0,-0.5\n1,0.25\n', encoding='utf-8')
    ticks = read_csv(str(target), 'log_price')
    assert ticks.scale == PriceScale.LOG_PRICE


@pytest.mark.parametrize('content, scale, column', [
    ('timestamp,price\n0,100\n,200\n2,50\n3,60\n', 'raw_price', 'timestamp'),
    ('timestamp,price\n0,0.1\n1,\n2,0.3\n', 'log_price', 'price'),
    ('timestamp,price\n0,0.1\n1,inf\n2,0.3\n', 'log_price', 'price'),
])
def test_read_csv_rejects_empty_cells(tmp_path, content, scale, column):
    target = tmp_path / 'ticks.csv'
    target.write_text(content, encoding='utf-8')
    with pytest.raises(IngestError, match=f'{column} vacío o no finito en la fila 2'):
        read_csv(str(target), scale)


def test_common_grid():
    a = TickSeries(np.array([0.0, 10.0]), np.array([1.0, 1.0]))
    b = TickSeries(np.array([2.5, 8.0]), np.array([1.0, 1.0]))
    assert common_grid(a, b, 0.5) == (2.5, 11)
    assert common_grid(a, b, 0.5, t0=3.0, n=4) == (3.0, 4)
    with pytest.raises(IngestError):
        common_grid(a, b, 10.0)


def test_write_aligned_csv(tmp_path):
    ticks = TickSeries(np.array([0.0, 2.0]), np.array([0.0, 1.0]), PriceScale.LOG_PRICE)
    target = tmp_path / 'aligned.csv'
    write_aligned_csv(align_to_grid(ticks, 0.0, 1.0, 2), str(target))
    lines = target.read_text(encoding='utf-8').splitlines()
    assert lines[0] == '# schema_version: 1'
    assert lines[3:] == ['k,return,observed', '0,0,1', '1,1,0', '2,,1']
