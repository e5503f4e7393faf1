"""Time series with an explicit missingness mask, summary statistics and CSV I/O.

CSV layout is ``t,value`` per line, an optional ``t,value`` header, and an
empty value field for a missing sample. Time stamps must increase by exactly
one from row to row.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from kzspec.errors import CSVFormatError, InsufficientDataError


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Real samples at consecutive integer times ``start_index, start_index+1, ...``.

    ``mask[i]`` is True when ``values[i]`` was observed. Masked-out values are
    never read by any statistic; they are stored as 0.0 only as a placeholder.
    """

    values: np.ndarray
    mask: np.ndarray
    start_index: int = 1

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        mask = np.ones(values.shape, dtype=bool) if self.mask is None else np.asarray(self.mask, dtype=bool)
        if mask.shape != values.shape:
            raise ValueError(f"values and mask lengths differ ({values.size} != {mask.size})")
        if values.size < 1:
            raise ValueError("a time series needs at least one sample")
        if not np.all(np.isfinite(values[mask])):
            raise ValueError("observed values must be finite")
        values = np.where(mask, values, 0.0)
        object.__setattr__(self, "values", _frozen(values, float))
        object.__setattr__(self, "mask", _frozen(mask, bool))
        object.__setattr__(self, "start_index", int(self.start_index))

    @classmethod
    def from_values(cls, values, start_index=1):
        values = np.asarray(values, dtype=float)
        return cls(values, np.ones(values.shape, dtype=bool), start_index)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.start_index == other.start_index
            and np.array_equal(self.mask, other.mask)
            and np.array_equal(self.values, other.values)
        )

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.start_index, self.start_index + len(self))

    @property
    def n_observed(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def observed(self) -> np.ndarray:
        return self.values[self.mask]

    @property
    def is_complete(self) -> bool:
        return bool(self.mask.all())

    def with_mask(self, mask) -> "TimeSeries":
        return TimeSeries(self.values, mask, self.start_index)

    def shifted(self, start_index: int) -> "TimeSeries":
        return TimeSeries(self.values, self.mask, start_index)


@dataclass(frozen=True)
class SeriesStats:
    n_observed: int
    mean: float
    variance: float
    total_power: float


def stats(ts: TimeSeries) -> SeriesStats:
    """Mean and variance over observed points only.

    ``variance`` uses the n-1 denominator, ``total_power`` the n denominator.
    """
    x = ts.observed
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"variance needs at least 2 observed points, got {n}")
    mean = math.fsum(x) / n
    ss = math.fsum((x - mean) ** 2)
    return SeriesStats(n_observed=n, mean=mean, variance=ss / (n - 1), total_power=ss / n)


def _format_value(v: float) -> str:
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def save_csv(ts: TimeSeries, path) -> None:
    if len(ts) == 0:
        raise ValueError("refusing to write an empty series")
    path = Path(path)
    lines = [
        f"{t},{_format_value(v) if m else ''}\n"
        for t, v, m in zip(ts.times.tolist(), ts.values.tolist(), ts.mask.tolist())
    ]
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.writelines(lines)
    except OSError as exc:
        raise OSError(f"cannot write series to {path}: {exc}") from exc


def load_csv(path) -> TimeSeries:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(enumerate(csv.reader(fh), start=1))

    rows = [(ln, r) for ln, r in rows if r and any(c.strip() for c in r)]
    if rows and [c.strip().lower() for c in rows[0][1]] == ["t", "value"]:
        rows = rows[1:]
    if not rows:
        raise CSVFormatError(f"{path} contains no data rows")

    times, values, mask = [], [], []
    for ln, row in rows:
        if len(row) != 2:
            raise CSVFormatError(f"expected 2 fields, got {len(row)}", line=ln)
        t_field, v_field = row[0].strip(), row[1].strip()
        try:
            t = int(t_field)
        except ValueError:
            raise CSVFormatError(f"time field {t_field!r} is not an integer", line=ln) from None
        if times and t != times[-1] + 1:
            raise CSVFormatError(f"time {t} does not follow {times[-1]}", line=ln)
        if v_field == "":
            values.append(0.0)
            mask.append(False)
        else:
            try:
                v = float(v_field)
            except ValueError:
                raise CSVFormatError(f"value {v_field!r} is not a number", line=ln) from None
            if not math.isfinite(v):
                raise CSVFormatError(f"value {v_field!r} is not finite; leave the field empty for missing", line=ln)
            values.append(v)
            mask.append(True)
        times.append(t)
    return TimeSeries(np.array(values), np.array(mask), times[0])
