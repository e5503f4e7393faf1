"""Autoregressive baseline: sample ACF, Yule-Walker fit by Levinson-Durbin, AIC order choice."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from kzspec.errors import InsufficientDataError, UnsupportedInputError
from kzspec.series import TimeSeries, stats


@dataclass(frozen=True, eq=False)
class ARModel:
    order: int
    coefficients: np.ndarray
    noise_variance: float
    aic: float
    stationary: bool
    aic_by_order: np.ndarray = field(repr=False, default=None)
    noise_variance_by_order: np.ndarray = field(repr=False, default=None)


def acf(ts: TimeSeries, max_lag: int) -> np.ndarray:
    """Sample autocorrelation at lags ``0..max_lag``.

    Each lag uses the pairs where both ends are observed. With complete data
    this is the usual estimator with the 1/n autocovariance.
    """
    n = len(ts)
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if ts.n_observed < max_lag + 2:
        raise InsufficientDataError(f"{ts.n_observed} observed points cannot support lag {max_lag}")
    y = np.where(ts.mask, ts.values - ts.observed.mean(), 0.0)
    w = ts.mask.astype(float)
    gamma = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        pairs = np.dot(w[: n - lag], w[lag:])
        s = np.dot(y[: n - lag], y[lag:])
        gamma[lag] = s / pairs * (n - lag) / n if pairs else 0.0
    if gamma[0] == 0:
        raise InsufficientDataError("autocorrelation undefined for a constant series")
    return gamma / gamma[0]


def autocovariance(x: np.ndarray, max_lag: int) -> np.ndarray:
    y = x - x.mean()
    n = y.size
    return np.array([np.dot(y[: n - k], y[k:]) / n for k in range(max_lag + 1)])


def levinson_durbin(r: np.ndarray, order: int):
    """Yule-Walker solutions for every order up to ``order``.

    Returns ``(phis, sigma2)`` where ``phis[p]`` holds the AR(p) coefficients
    and ``sigma2[p]`` the innovation variance.
    """
    sigma2 = np.empty(order + 1)
    sigma2[0] = r[0]
    phis = [np.zeros(0)]
    phi = np.zeros(0)
    for p in range(1, order + 1):
        if sigma2[p - 1] <= 0:
            phis.extend([phi] * (order + 1 - p))
            sigma2[p:] = 0.0
            break
        refl = (r[p] - np.dot(phi, r[p - 1 : 0 : -1])) / sigma2[p - 1]
        phi = np.concatenate((phi - refl * phi[::-1], [refl]))
        sigma2[p] = max(sigma2[p - 1] * (1.0 - refl * refl), 0.0)
        phis.append(phi)
    return phis, sigma2


def _is_stationary(phi):
    if phi.size == 0:
        return True
    # Roots of z**p - phi_1 z**(p-1) - ... - phi_p must lie inside the unit circle.
    return bool(np.all(np.abs(np.roots(np.concatenate(([1.0], -phi)))) < 1.0))


def yule_walker(ts: TimeSeries, max_order: int | None = None) -> ARModel:
    """Fit AR(p) for p = 0..max_order and keep the AIC minimiser.

    ``AIC(p) = n log(sigma2_p) + 2p``. The default ``max_order`` is
    ``floor(10 log10(n))``. The series mean is removed first.
    """
    if not ts.is_complete:
        raise UnsupportedInputError("the autoregressive baseline needs a series without missing values")
    n = len(ts)
    if max_order is None:
        max_order = int(math.floor(10 * math.log10(n)))
    max_order = min(max_order, n - 2)
    if max_order < 0:
        raise InsufficientDataError(f"{n} points are too few for an autoregression")
    r = autocovariance(ts.values, max_order)
    if r[0] == 0:
        raise InsufficientDataError("cannot fit an autoregression to a constant series")
    phis, sigma2 = levinson_durbin(r, max_order)
    with np.errstate(divide="ignore"):
        aic = n * np.log(sigma2) + 2 * np.arange(max_order + 1)
    p = int(np.argmin(aic))
    return ARModel(p, phis[p], float(sigma2[p]), float(aic[p]), _is_stationary(phis[p]), aic, sigma2)


def unexplained_ratio(model: ARModel, ts: TimeSeries) -> float:
    """Innovation variance over the sample variance of ``ts``, clamped to [0, 1]."""
    var = stats(ts).variance
    if var == 0:
        raise InsufficientDataError("series has zero variance")
    return float(min(max(model.noise_variance / var, 0.0), 1.0))
