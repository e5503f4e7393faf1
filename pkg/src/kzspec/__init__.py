"""Kolmogorov-Zurbenko periodograms with adaptive (DZ / NZ) smoothing."""

from kzspec.series import TimeSeries, SeriesStats, load_csv, save_csv, stats
from kzspec.simulate import SignalSpec, generate, clean_signal, inject_missing, snr
from kzspec.spectrum import (
    FrequencyGrid,
    Periodogram,
    ComplexSeries,
    raw_periodogram,
    window_weights,
    smooth_fixed,
    kzft,
    kz_periodogram,
)
from kzspec.adaptive import (
    SmoothedPeriodogram,
    KzpResult,
    dz_smooth,
    nz_smooth,
    top_frequencies,
    kzp,
)
from kzspec.reconstruct import Reconstruction, FitMetrics, reconstruct, fit_metrics
from kzspec.arbaseline import ARModel, acf, yule_walker, unexplained_ratio

__version__ = "0.1.0"

__all__ = [
    "TimeSeries",
    "SeriesStats",
    "load_csv",
    "save_csv",
    "stats",
    "SignalSpec",
    "generate",
    "clean_signal",
    "inject_missing",
    "snr",
    "FrequencyGrid",
    "Periodogram",
    "ComplexSeries",
    "raw_periodogram",
    "window_weights",
    "smooth_fixed",
    "kzft",
    "kz_periodogram",
    "SmoothedPeriodogram",
    "KzpResult",
    "dz_smooth",
    "nz_smooth",
    "top_frequencies",
    "kzp",
    "Reconstruction",
    "FitMetrics",
    "reconstruct",
    "fit_metrics",
    "ARModel",
    "acf",
    "yule_walker",
    "unexplained_ratio",
]
