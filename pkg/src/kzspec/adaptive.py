"""Adaptive periodogram smoothing (DiRienzo-Zurbenko, Neagu-Zurbenko) and peak reporting.

Both smoothers grow a window around every frequency, one grid step per side
at a time, until the window holds a fixed share ``smooth_level`` of the
spectrum's total "variation". The window then averages the spectrum. Spikes
carry a lot of variation, so windows stay narrow there and widen across flat
stretches.

Near the ends of the grid a window keeps its width ``2A + 1`` by sliding
inward instead of being cut off, so a window that reaches ``len(grid)``
points covers the whole grid.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from kzspec.series import TimeSeries
from kzspec.spectrum import FrequencyGrid, Periodogram, kz_periodogram

# Relative slack on the stopping threshold. Keeps the chosen width stable when
# the window statistic equals the threshold up to rounding (e.g. after rescaling).
_STOP_RTOL = 1e-9
# Relative floor under the log-periodogram: delta = _NZ_FLOOR * max(I).
_NZ_FLOOR = 1e-12


class Method(str, enum.Enum):
    DZ = "DZ"
    NZ = "NZ"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, Method):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown smoothing method {value!r}; expected 'DZ' or 'NZ'") from None


@dataclass(frozen=True, eq=False)
class SmoothedPeriodogram:
    grid: FrequencyGrid
    smoothed: np.ndarray
    half_widths: np.ndarray
    method: Method
    smooth_level: float
    window_lo: np.ndarray = field(repr=False, default=None)
    window_hi: np.ndarray = field(repr=False, default=None)

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.points


@dataclass(frozen=True, eq=False)
class KzpResult:
    top_frequencies: list
    raw: Periodogram
    smoothed: SmoothedPeriodogram
    total_variance: float
    params: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "top_frequencies": list(self.top_frequencies),
            "total_variance": self.total_variance,
            "n_used": self.raw.n_used,
            **self.params,
        }

    def save(self, summary_path, spectrum_path) -> None:
        Path(summary_path).write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        with open(spectrum_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("frequency,raw,smoothed,half_width\n")
            for f, r, s, a in zip(
                self.raw.frequencies.tolist(), self.raw.intensity.tolist(),
                self.smoothed.smoothed.tolist(), self.smoothed.half_widths.tolist(),
            ):
                fh.write(f"{f!r},{r!r},{s!r},{int(a)}\n")


def _windows(n, half_width, centre):
    width = np.minimum(2 * half_width + 1, n)
    lo = np.clip(centre - half_width, 0, n - width)
    return lo, lo + width - 1


def _scan(cum: np.ndarray, threshold: float, n: int, per_point: bool):
    """Smallest half width per index whose window statistic reaches ``threshold``.

    ``cum`` is a prefix-sum array. With ``per_point`` the terms belong to grid
    points and window [lo, hi] sums ``cum[hi + 1] - cum[lo]``. Otherwise the
    terms live between neighbours (``n - 1`` of them) and a window sums every
    difference touching one of its points, so even a single point sees the
    steps to its two neighbours.
    """
    half = np.zeros(n, dtype=int)
    active = np.arange(n)
    target = threshold * (1.0 - _STOP_RTOL)
    for a in range(n):
        lo, hi = _windows(n, a, active)
        if per_point:
            stat = cum[hi + 1] - cum[lo]
        else:
            stat = cum[np.minimum(hi, n - 2) + 1] - cum[np.maximum(lo - 1, 0)]
        done = (stat >= target) | (hi - lo + 1 >= n)
        half[active[done]] = a
        active = active[~done]
        if active.size == 0:
            break
    return half


def _window_means(values, lo, hi):
    out = np.empty(values.size)
    for j, (a, b) in enumerate(zip(lo, hi)):
        w = values[a : b + 1]
        # Clip guards the average against rounding outside the window's range.
        out[j] = min(max(w.mean(), w.min()), w.max())
    return out


def dz_smooth(pg: Periodogram, smooth_level: float, variation: str = "sumsq") -> SmoothedPeriodogram:
    """DiRienzo-Zurbenko adaptive smoothing.

    ``variation='sumsq'`` measures a window by the sum of squared ordinates
    it contains; ``'diff2'`` by the sum of squared differences between
    neighbouring ordinates inside it. Each window stops growing once its
    measure reaches ``smooth_level`` times the measure of the whole grid.
    """
    _check_level(smooth_level)
    x = pg.intensity
    n = x.size
    if n == 0:
        raise ValueError("empty periodogram")
    if not np.any(x):
        zeros = np.zeros(n, dtype=int)
        idx = np.arange(n)
        return SmoothedPeriodogram(pg.grid, x.copy(), zeros, Method.DZ, smooth_level, idx, idx)
    scaled = x / x.max()
    if variation == "sumsq":
        terms, per_point = scaled**2, True
    elif variation == "diff2":
        terms, per_point = np.diff(scaled) ** 2, False
    else:
        raise ValueError(f"unknown variation measure {variation!r}")
    cum = np.concatenate(([0.0], np.cumsum(terms)))
    half = _scan(cum, smooth_level * cum[-1], n, per_point)
    lo, hi = _windows(n, half, np.arange(n))
    return SmoothedPeriodogram(pg.grid, _window_means(x, lo, hi), half, Method.DZ, smooth_level, lo, hi)


def nz_smooth(pg: Periodogram, smooth_level: float) -> SmoothedPeriodogram:
    """Neagu-Zurbenko smoothing: the same window scan on the log-periodogram.

    Windows are measured by squared first differences of
    ``log(I + delta)`` with ``delta = 1e-12 * max(I)``, averaged in the log
    domain and mapped back to intensities. Rescaling ``I`` shifts the logs
    and leaves the chosen widths alone. A spectrum with no log variation at
    all (a constant) carries no information to steer the widths, and falls
    back to the DZ rule.
    """
    _check_level(smooth_level)
    x = pg.intensity
    n = x.size
    if n == 0:
        raise ValueError("empty periodogram")
    top = x.max()
    if top == 0 or np.all(x == x[0]):
        res = dz_smooth(pg, smooth_level)
        return SmoothedPeriodogram(pg.grid, res.smoothed, res.half_widths, Method.NZ, smooth_level, res.window_lo, res.window_hi)
    # Same as log((I + delta) / max), but the floor is added after dividing
    # so it cannot underflow when max(I) is tiny.
    logs = np.log(x / top + _NZ_FLOOR)
    cum = np.concatenate(([0.0], np.cumsum(np.diff(logs) ** 2)))
    half = _scan(cum, smooth_level * cum[-1], n, False)
    lo, hi = _windows(n, half, np.arange(n))
    smoothed = np.maximum((np.exp(_window_means(logs, lo, hi)) - _NZ_FLOOR) * top, 0.0)
    return SmoothedPeriodogram(pg.grid, smoothed, half, Method.NZ, smooth_level, lo, hi)


def _check_level(smooth_level):
    if not 0.0 < smooth_level < 1.0:
        raise ValueError(f"smooth_level must lie strictly between 0 and 1, got {smooth_level}")


def local_maxima(values: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima; a flat-topped peak reports its leftmost index."""
    v = np.asarray(values)
    n = v.size
    out = []
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and v[j + 1] == v[i]:
            j += 1
        if j < n - 1 and v[i - 1] < v[i] and v[j + 1] < v[i]:
            out.append(i)
        i = j + 1
    return np.array(out, dtype=int)


def top_frequencies(spg, top: int = 1, digits: int = 3) -> list:
    """Frequencies of the ``top`` highest local maxima, rounded to ``digits`` decimals.

    Accepts a :class:`SmoothedPeriodogram` or a plain :class:`Periodogram`.
    Equal heights rank by lower frequency; 0 and 0.5 are never reported.
    """
    if top < 1:
        raise ValueError("top must be >= 1")
    values = spg.smoothed if isinstance(spg, SmoothedPeriodogram) else spg.intensity
    freqs = spg.grid.points
    peaks = [i for i in local_maxima(values) if not (math.isclose(freqs[i], 0.0, abs_tol=1e-12) or math.isclose(freqs[i], 0.5))]
    peaks.sort(key=lambda i: (-values[i], freqs[i]))
    out = []
    for i in peaks:
        f = round(float(freqs[i]), digits)
        if f not in out:
            out.append(f)
        if len(out) == top:
            break
    return out


def kzp(
    ts: TimeSeries,
    m: int,
    k: int = 1,
    smooth_level: float = 0.05,
    method="DZ",
    digits: int = 3,
    top: int = 1,
    *,
    oversample: int = 1,
    edge: str = "drop",
    min_weight: float = 0.5,
    variation: str = "sumsq",
) -> KzpResult:
    """KZ periodogram, adaptive smoothing and top-frequency report in one call."""
    method = Method.parse(method)
    raw = kz_periodogram(ts, m, k, oversample=oversample, edge=edge, min_weight=min_weight)
    if method is Method.DZ:
        sm = dz_smooth(raw, smooth_level, variation=variation)
    else:
        sm = nz_smooth(raw, smooth_level)
    params = dict(
        m=m, k=k, smooth_level=smooth_level, method=method.value, digits=digits, top=top,
        oversample=oversample, edge=edge, min_weight=min_weight,
    )
    return KzpResult(top_frequencies(sm, top, digits), raw, sm, raw.mass, params)
