import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kzspec.errors import CSVFormatError, InsufficientDataError
from kzspec.series import TimeSeries, load_csv, save_csv, stats

finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)


@st.composite
def series(draw, min_size=1, max_size=60):
    values = draw(st.lists(finite, min_size=min_size, max_size=max_size))
    mask = draw(st.lists(st.booleans(), min_size=len(values), max_size=len(values)))
    start = draw(st.integers(-1000, 1000))
    return TimeSeries(np.array(values), np.array(mask, dtype=bool), start)


def test_load_rows_with_a_gap(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,0.5\n2,\n3,-0.2\n")
    ts = load_csv(p)
    assert len(ts) == 3
    assert ts.mask.tolist() == [True, False, True]
    assert ts.observed.tolist() == [0.5, -0.2]
    assert ts.start_index == 1


def test_header_and_blank_lines_are_accepted(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("t,value\n\n5,1\n6,2\n")
    ts = load_csv(p)
    assert ts.start_index == 5 and ts.values.tolist() == [1.0, 2.0]


@pytest.mark.parametrize("text, line", [
    ("", None),
    ("1,2,3\n", 1),
    ("1,2\n3,4\n", 2),
    ("1,abc\n", 1),
    ("1,nan\n", 1),
    ("x,1\n", 1),
])
def test_malformed_csv_is_rejected(tmp_path, text, line):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(CSVFormatError) as info:
        load_csv(p)
    if line is not None:
        assert info.value.line == line


def test_save_writes_empty_field_for_missing(tmp_path):
    p = tmp_path / "out.csv"
    save_csv(TimeSeries(np.array([1.0, 7.0]), np.array([True, False])), p)
    assert p.read_text() == "1,1\n2,\n"


def test_zero_length_series_cannot_exist():
    with pytest.raises(ValueError):
        TimeSeries.from_values([])


@given(series())
def test_csv_round_trip(tmp_path_factory, ts):
    p = tmp_path_factory.mktemp("rt") / "s.csv"
    save_csv(ts, p)
    assert load_csv(p) == ts


def test_stats_of_a_constant():
    s = stats(TimeSeries.from_values([1, 1, 1, 1]))
    assert (s.n_observed, s.mean, s.variance, s.total_power) == (4, 1.0, 0.0, 0.0)


def test_variance_needs_two_observations():
    ts = TimeSeries(np.array([0.0, 2.0]), np.array([True, False]))
    with pytest.raises(InsufficientDataError):
        stats(ts)


def test_variance_uses_n_minus_one():
    s = stats(TimeSeries.from_values([1.0, 2.0, 3.0, 4.0]))
    assert s.variance == pytest.approx(5 / 3)
    assert s.total_power == pytest.approx(5 / 4)


@given(series(min_size=3), st.integers(-10**6, 10**6))
def test_stats_ignore_start_index(ts, start):
    if ts.n_observed < 2:
        return
    assert stats(ts) == stats(ts.shifted(start))


@given(series(min_size=3), st.data())
def test_mask_then_unmask_restores_stats(ts, data):
    source = ts.values.copy()
    full = TimeSeries(source, np.ones(len(ts), dtype=bool), ts.start_index)
    i = data.draw(st.integers(0, len(ts) - 1))
    hidden = np.ones(len(ts), dtype=bool)
    hidden[i] = False
    masked = TimeSeries(source, hidden, ts.start_index)
    assert masked.n_observed == len(ts) - 1
    unmasked = TimeSeries(source, np.ones(len(ts), dtype=bool), ts.start_index)
    assert stats(unmasked) == stats(full)


@given(series(min_size=3), finite)
def test_masked_slots_are_never_read(ts, junk):
    if ts.n_observed < 2 or ts.is_complete:
        return
    values = ts.values.copy()
    values[~ts.mask] = junk
    assert stats(TimeSeries(values, ts.mask, ts.start_index)) == stats(ts)


def test_series_is_read_only():
    ts = TimeSeries.from_values([1.0, 2.0])
    with pytest.raises(ValueError):
        ts.values[0] = 3.0
    assert math.isclose(ts.values[0], 1.0)
