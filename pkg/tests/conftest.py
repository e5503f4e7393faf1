import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=100, deadline=None)
settings.register_profile("thorough", max_examples=1000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def naive_dft_periodogram(values, mask, freqs):
    """O(N * F) periodogram written straight from the definition, in pure Python floats.

    Independent of the library's folding/FFT path: one ``math.fsum`` per
    frequency over the observed samples, times counted from zero.
    """
    obs = [(t, float(v)) for t, (v, ok) in enumerate(zip(values, mask)) if ok]
    n_obs = len(obs)
    mean = math.fsum(v for _, v in obs) / n_obs
    out = []
    for f in freqs:
        re = math.fsum((v - mean) * math.cos(2 * math.pi * f * t) for t, v in obs)
        im = math.fsum(-(v - mean) * math.sin(2 * math.pi * f * t) for t, v in obs)
        out.append((re * re + im * im) / (2 * math.pi * n_obs))
    return np.array(out)


def naive_kzft(values, mask, m, k, f, t0=1):
    """KZFT at every time whose full window fits, by explicit kernel sums."""
    w = np.ones(1)
    for _ in range(k):
        w = np.convolve(w, np.full(m, 1.0 / m))
    support = w.size
    h = (support - 1) // 2
    values = np.asarray(values, float)
    mask = np.asarray(mask, bool)
    n = values.size
    out = {}
    for c in range(h, n - (support - 1 - h)):
        s = np.arange(c - h, c - h + support)
        obs = mask[s]
        mass = w[obs].sum()
        if mass <= 0:
            continue
        tt = s + t0
        out[c + t0] = np.sum(w[obs] * values[s][obs] * np.exp(-2j * np.pi * f * tt[obs])) / mass
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
