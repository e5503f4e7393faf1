"""Rebuild the periodic part of a series from a list of frequencies via the KZFT."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kzspec.errors import InsufficientDataError
from kzspec.series import TimeSeries
from kzspec.spectrum import kzft


@dataclass(frozen=True, eq=False)
class Reconstruction:
    estimate: TimeSeries
    components: list  # (frequency, ComplexSeries) pairs
    warmup: int  # leading plus trailing times without an estimate


@dataclass(frozen=True)
class FitMetrics:
    r: float
    r_squared: float
    n_scored: int


def reconstruct(ts: TimeSeries, freqs, m: int, k: int, edge: str = "drop", min_weight: float = 0.5) -> Reconstruction:
    """Sum of ``2 Re(KZFT_f(t) exp(2 pi i f t))`` over ``freqs``.

    Times where the transform is undefined (window overhangs the series or
    too little of it is observed) are masked in the estimate.
    """
    freqs = [float(f) for f in freqs]
    if not freqs:
        raise ValueError("need at least one frequency to reconstruct")
    for f in freqs:
        if not 0.0 < f < 0.5:
            raise ValueError(f"reconstruction frequency must lie in (0, 0.5), got {f}")
    comps = []
    est = np.zeros(len(ts))
    valid = None
    for f in freqs:
        cs = kzft(ts, m, k, f, edge=edge, min_weight=min_weight)
        pos = cs.times - ts.start_index
        if valid is None:
            valid = np.zeros(len(ts), dtype=bool)
            valid[pos] = True
        est[pos] += 2.0 * np.real(cs.coefficients * np.exp(2j * np.pi * f * cs.times))
        comps.append((f, cs))
    if not valid.any():
        raise InsufficientDataError("the KZ transform is undefined at every time")
    first, last = np.flatnonzero(valid)[[0, -1]]
    warmup = int(first + (len(ts) - 1 - last))
    return Reconstruction(TimeSeries(est, valid, ts.start_index), comps, warmup)


def fit_metrics(truth: TimeSeries, estimate: TimeSeries) -> FitMetrics:
    """Pearson correlation over the times observed in both series."""
    if len(truth) != len(estimate):
        raise ValueError(f"series lengths differ ({len(truth)} != {len(estimate)})")
    joint = truth.mask & estimate.mask
    n = int(joint.sum())
    if n < 3:
        raise InsufficientDataError(f"need at least 3 jointly observed points, got {n}")
    a = truth.values[joint] - truth.values[joint].mean()
    b = estimate.values[joint] - estimate.values[joint].mean()
    denom = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if denom == 0:
        raise InsufficientDataError("correlation undefined: one of the series is constant")
    r = float(np.clip(np.dot(a, b) / denom, -1.0, 1.0))
    return FitMetrics(r, r * r, n)


def save_reconstruction(path, observed: TimeSeries, rec: Reconstruction, truth: TimeSeries | None = None) -> None:
    """Write ``t,truth,observed,estimate``; missing cells are left empty."""

    def cell(series, i):
        return repr(float(series.values[i])) if series is not None and series.mask[i] else ""

    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,truth,observed,estimate\n")
        for i, t in enumerate(observed.times.tolist()):
            fh.write(f"{t},{cell(truth, i)},{cell(observed, i)},{cell(rec.estimate, i)}\n")
