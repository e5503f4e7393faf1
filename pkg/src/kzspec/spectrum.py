"""Raw periodogram, fixed spectral windows, and the Kolmogorov-Zurbenko Fourier transform.

Frequencies are in cycles per time step. Every estimator here skips masked
samples rather than reading them as zero.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from kzspec.errors import InsufficientDataError
from kzspec.series import TimeSeries

# Slack when testing "observed window weight >= threshold", so a window that
# is exactly half observed is not rejected by cumulative-sum rounding.
_WEIGHT_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    step: float

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"grid step must be positive, got {self.step}")
        if self.step > 0.5:
            raise ValueError("grid step above 0.5 leaves a single point; use a finer grid")

    @classmethod
    def for_window(cls, m: int, oversample: int = 1) -> "FrequencyGrid":
        """Grid spaced ``1 / (m * oversample)``: the natural resolution of a width-m window."""
        return cls(1.0 / (m * oversample))

    @classmethod
    def fourier(cls, n: int) -> "FrequencyGrid":
        return cls(1.0 / n)

    @property
    def points(self) -> np.ndarray:
        count = int(math.floor(0.5 / self.step + 1e-9)) + 1
        return np.arange(count) * self.step

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        return isinstance(other, FrequencyGrid) and self.step == other.step

    def _period(self):
        """Integer P with step == 1/P, or None."""
        p = 1.0 / self.step
        r = round(p)
        return int(r) if r >= 1 and abs(p - r) <= 1e-9 * p else None


@dataclass(frozen=True, eq=False)
class Periodogram:
    grid: FrequencyGrid
    intensity: np.ndarray
    n_used: int

    def __post_init__(self):
        intensity = np.asarray(self.intensity, dtype=float)
        if intensity.shape != (len(self.grid),):
            raise ValueError(f"{intensity.size} intensities for a grid of {len(self.grid)} points")
        if np.any(intensity < 0):
            raise ValueError("periodogram intensities must be nonnegative")
        object.__setattr__(self, "intensity", intensity)

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.points

    @property
    def mass(self) -> float:
        """Spectral mass ``sum(I * step)`` over the one-sided grid."""
        return float(np.sum(self.intensity) * self.grid.step)

    def to_csv(self, path, half_widths=None) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if half_widths is None:
                fh.write("frequency,intensity\n")
                for f, v in zip(self.frequencies.tolist(), self.intensity.tolist()):
                    fh.write(f"{f!r},{v!r}\n")
            else:
                fh.write("frequency,intensity,window_halfwidth\n")
                for f, v, a in zip(self.frequencies.tolist(), self.intensity.tolist(), half_widths):
                    fh.write(f"{f!r},{v!r},{int(a)}\n")


@dataclass(frozen=True, eq=False)
class ComplexSeries:
    """KZFT output: complex coefficients at the times where the transform is defined."""

    times: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.coefficients):
            raise ValueError("times and coefficients differ in length")

    def __len__(self):
        return len(self.times)


class WindowForm(str, enum.Enum):
    UNIFORM = "uniform"
    BARTLETT = "bartlett"
    GAUSSIAN = "gaussian"
    PARZEN = "parzen"
    TUKEY_HAMMING = "tukey_hamming"


def _centered_observed(ts: TimeSeries) -> np.ndarray:
    """Observed values minus their mean; masked slots hold exactly zero."""
    if ts.n_observed == 0:
        raise InsufficientDataError("series has no observed samples")
    mean = math.fsum(ts.observed) / ts.n_observed
    return np.where(ts.mask, ts.values - mean, 0.0)


def _dft(y: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """``sum_t y[t] exp(-2 pi i f t)`` for t = 0..len(y)-1 at every grid frequency."""
    n = y.size
    freqs = grid.points
    period = grid._period()
    if period is not None:
        # Fold the series modulo P, then one length-P FFT gives every f = j/P.
        rows = -(-n // period)
        padded = np.zeros(rows * period)
        padded[:n] = y
        # Transpose to make the fold axis contiguous so numpy sums it pairwise.
        folded = np.ascontiguousarray(padded.reshape(rows, period).T).sum(axis=1)
        return np.fft.fft(folded)[: freqs.size]
    out = np.empty(freqs.size, dtype=complex)
    t = np.arange(n)
    for lo in range(0, freqs.size, 256):
        f = freqs[lo : lo + 256]
        out[lo : lo + 256] = np.exp(-2j * np.pi * np.outer(f, t)) @ y
    return out


def raw_periodogram(ts: TimeSeries, grid: FrequencyGrid | None = None) -> Periodogram:
    """Classical periodogram ``|sum (X_t - mean) exp(-2 pi i f t)|**2 / (2 pi n_obs)``.

    Sums run over observed samples only and ``n_obs`` replaces the series
    length, so under random missingness the noise level matches the complete
    data case. Defaults to the Fourier grid of step ``1/len(ts)``.
    """
    if ts.n_observed < 2:
        raise InsufficientDataError(f"periodogram needs at least 2 observed points, got {ts.n_observed}")
    grid = FrequencyGrid.fourier(len(ts)) if grid is None else grid
    if len(grid) == 0:
        raise ValueError("empty frequency grid")
    s = _dft(_centered_observed(ts), grid)
    intensity = (s.real**2 + s.imag**2) / (2 * np.pi * ts.n_observed)
    return Periodogram(grid, intensity, ts.n_observed)


def window_weights(form, half_width: int) -> np.ndarray:
    """Discrete spectral window ``w[-A..A]``, symmetric, nonnegative, summing to one.

    Lag positions are scaled by ``A + 1`` so that every form keeps positive
    weight at the window ends; the Gaussian is truncated at three standard
    deviations instead.
    """
    form = WindowForm(form)
    a = int(half_width)
    if a < 0:
        raise ValueError(f"half width must be >= 0, got {half_width}")
    if a == 0:
        return np.ones(1)
    j = np.arange(-a, a + 1, dtype=float)
    x = np.abs(j) / (a + 1)
    if form is WindowForm.UNIFORM:
        w = np.ones_like(j)
    elif form is WindowForm.BARTLETT:
        w = 1.0 - x
    elif form is WindowForm.GAUSSIAN:
        w = np.exp(-0.5 * (3.0 * j / a) ** 2)
    elif form is WindowForm.PARZEN:
        w = np.where(x <= 0.5, 1 - 6 * x**2 + 6 * x**3, 2 * (1 - x) ** 3)
    else:
        w = 0.54 + 0.46 * np.cos(np.pi * x)
    w = w / w.sum()
    # Average with the mirror image so symmetry is exact in floating point.
    return 0.5 * (w + w[::-1])


def smooth_fixed(pg: Periodogram, form, half_width: int) -> Periodogram:
    """Fixed-width smoothing of the periodogram (Grenander-Rosenblatt estimate).

    The one-sided spectrum is extended by mirror reflection about 0 and 0.5,
    which is how a real series' periodogram continues around the circle.
    """
    n = len(pg.grid)
    if not 0 <= half_width < n:
        raise ValueError(f"half width must lie in [0, {n - 1}], got {half_width}")
    if half_width == 0:
        return Periodogram(pg.grid, pg.intensity.copy(), pg.n_used)
    w = window_weights(form, half_width)
    mode = "reflect" if n > 1 else "edge"
    ext = np.pad(pg.intensity, half_width, mode=mode)
    out = np.convolve(ext, w, mode="valid")
    return Periodogram(pg.grid, np.maximum(out, 0.0), pg.n_used)


def kz_weights(m: int, k: int) -> np.ndarray:
    """Coefficients of the k-fold self-convolution of a uniform width-m average."""
    w = np.ones(1)
    box = np.full(m, 1.0 / m)
    for _ in range(k):
        w = np.convolve(w, box)
    return w


def _moving_sum_full(y: np.ndarray, m: int) -> np.ndarray:
    """Full linear convolution of ``y`` (along the last axis) with ``ones(m)``."""
    length = y.shape[-1]
    c = np.zeros(y.shape[:-1] + (length + 1,), dtype=y.dtype)
    np.cumsum(y, axis=-1, out=c[..., 1:])
    i = np.arange(length + m - 1)
    return c[..., np.minimum(i + 1, length)] - c[..., np.maximum(i + 1 - m, 0)]


def _kz_filter_full(y: np.ndarray, m: int, k: int) -> np.ndarray:
    for _ in range(k):
        y = _moving_sum_full(y, m) / m
    return y


def _check_kz_args(ts, m, k, edge):
    if m < 2:
        raise ValueError(f"window width m must be >= 2, got {m}")
    if k < 1:
        raise ValueError(f"iterations k must be >= 1, got {k}")
    if edge not in ("drop", "partial", "auto"):
        raise ValueError(f"edge must be 'drop', 'partial' or 'auto', got {edge!r}")
    support = k * (m - 1) + 1
    if edge == "auto":
        edge = "drop" if len(ts) >= support else "partial"
    if edge == "drop" and len(ts) < support:
        raise InsufficientDataError(
            f"series of length {len(ts)} is shorter than the KZ window support {support} "
            "(use edge='partial' to allow windows that overhang the ends)"
        )
    return support, edge


def _kz_valid(ts: TimeSeries, m: int, k: int, edge: str, min_weight: float):
    """Observed kernel mass per time and the times at which the transform is emitted.

    A time is kept when the observed weight under its window reaches
    ``min_weight`` times the series' overall observed fraction. For complete
    data that is simply ``min_weight``; under random missingness it keeps the
    rule from discarding every time once half the data are gone.
    """
    support, edge = _check_kz_args(ts, m, k, edge)
    n = len(ts)
    h = (support - 1) // 2
    full = _kz_filter_full(ts.mask.astype(float), m, k)
    idx = np.arange(n) - h + support - 1
    mass = full[idx]
    valid = mass >= min_weight * (ts.n_observed / n) - _WEIGHT_SLACK
    valid &= mass > _WEIGHT_SLACK
    if edge == "drop":
        t = np.arange(n)
        valid &= (t - h >= 0) & (t - h + support - 1 <= n - 1)
    return idx, mass, valid


def _kzft_many(ts, y, m, k, freqs, idx, mass, valid, chunk=64):
    """Rows of KZFT coefficients (only at valid times) for each frequency."""
    t_abs = ts.times.astype(float)
    yv = np.where(ts.mask, y, 0.0)
    out = np.empty((len(freqs), int(valid.sum())), dtype=complex)
    for lo in range(0, len(freqs), chunk):
        f = np.asarray(freqs[lo : lo + chunk], dtype=float)
        demod = yv * np.exp(-2j * np.pi * np.outer(f, t_abs))
        full = _kz_filter_full(demod, m, k)
        out[lo : lo + chunk] = full[:, idx[valid]] / mass[valid]
    return out


def kzft(ts: TimeSeries, m: int, k: int, f: float, edge: str = "drop", min_weight: float = 0.5) -> ComplexSeries:
    """Kolmogorov-Zurbenko Fourier transform of ``ts`` at frequency ``f``.

    The coefficient at time t is the KZ(m, k) weighted average of
    ``X_s exp(-2 pi i f s)`` over the window centred on t, renormalised by the
    observed share of the weights. ``edge='drop'`` only emits times whose full
    window lies inside the series; ``edge='partial'`` treats samples beyond
    the ends as missing; ``edge='auto'`` picks 'drop' when the series is at
    least as long as the window support ``k(m-1)+1`` and 'partial' otherwise.
    """
    if not 0.0 <= f <= 0.5:
        raise ValueError(f"frequency must lie in [0, 0.5], got {f}")
    idx, mass, valid = _kz_valid(ts, m, k, edge, min_weight)
    coef = _kzft_many(ts, ts.values, m, k, [f], idx, mass, valid)[0]
    return ComplexSeries(ts.times[valid], coef)


def kz_periodogram(
    ts: TimeSeries,
    m: int,
    k: int,
    oversample: int = 1,
    edge: str = "drop",
    min_weight: float = 0.5,
) -> Periodogram:
    """KZ periodogram on the grid of step ``1/(m * oversample)``.

    ``intensity = m / (2 pi) * mean_t |KZFT(t)|**2`` over the times where the
    transform is defined. The factor ``m / (2 pi)`` gives a noiseless on-grid
    sinusoid the same spectral mass as in :func:`raw_periodogram`, and white
    noise of variance s2 a level of ``s2 / (2 pi)`` when k = 1.
    """
    idx, mass, valid = _kz_valid(ts, m, k, edge, min_weight)
    if not valid.any():
        raise InsufficientDataError("no time has enough observed window weight for the KZ transform")
    grid = FrequencyGrid.for_window(m, oversample)
    y = _centered_observed(ts)
    coef = _kzft_many(ts, y, m, k, grid.points, idx, mass, valid)
    power = np.mean(coef.real**2 + coef.imag**2, axis=1)
    return Periodogram(grid, m / (2 * np.pi) * power, ts.n_observed)
