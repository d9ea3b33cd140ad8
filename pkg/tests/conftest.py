"""Shared test helpers: signal builders and independent oracles.

The oracles here deliberately avoid the library's computation paths: the
cross-correlation oracle evaluates the direct O(N^2) sum, and the ROC-AUC
oracle sweeps every score threshold and integrates the curve.
"""

import numpy as np
import pytest

from envib import Signal


def tone(f0=8000.0, fs=64000.0, n=6400, amplitude=1.0, phase=0.0) -> Signal:
    t = np.arange(n) / fs
    return Signal(amplitude * np.cos(2.0 * np.pi * f0 * t + phase), fs)


def am_tone(f0=8000.0, fm=120.0, depth=0.5, fs=64000.0, n=6400) -> Signal:
    t = np.arange(n) / fs
    return Signal((1.0 + depth * np.cos(2.0 * np.pi * fm * t)) * np.cos(2.0 * np.pi * f0 * t), fs)


def interior(n: int, fraction: float = 0.05) -> slice:
    """Index slice excluding the outer ``fraction`` of samples on each side."""
    edge = int(np.ceil(n * fraction))
    return slice(edge, n - edge)


def direct_cross_correlation(amp, freq):
    """Direct O(N^2) full cross-correlation sum_n amp[n] * freq[n-k].

    One dot product per lag over the overlapping index range; no FFT
    involved anywhere.
    """
    amp = np.asarray(amp, dtype=np.float64)
    freq = np.asarray(freq, dtype=np.float64)
    n = amp.size
    lags = np.arange(-(n - 1), n)
    values = np.empty(2 * n - 1)
    for i, k in enumerate(lags):
        lo = max(0, k)
        hi = min(n, n + k)
        values[i] = float(np.dot(amp[lo:hi], freq[lo - k : hi - k]))
    return lags, values


def python_loop_cross_correlation(amp, freq):
    """Pure-Python double loop; validates the vectorized oracle itself."""
    n = len(amp)
    lags = list(range(-(n - 1), n))
    values = []
    for k in lags:
        total = 0.0
        for i in range(n):
            j = i - k
            if 0 <= j < n:
                total += amp[i] * freq[j]
        values.append(total)
    return np.array(lags), np.array(values)


def sweep_roc_auc(scores, is_positive) -> float:
    """Exhaustive threshold-sweep ROC-AUC with trapezoidal integration."""
    scores = np.asarray(scores, dtype=np.float64)
    is_positive = np.asarray(is_positive, dtype=bool)
    n_pos = int(is_positive.sum())
    n_neg = scores.size - n_pos
    fpr = [0.0]
    tpr = [0.0]
    for threshold in np.unique(scores)[::-1]:
        predicted = scores >= threshold
        tpr.append(float((predicted & is_positive).sum()) / n_pos)
        fpr.append(float((predicted & ~is_positive).sum()) / n_neg)
    return float(np.trapezoid(tpr, fpr))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
