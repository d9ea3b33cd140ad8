"""Joint envelope representations built from instantaneous series.

Three representations pair the envelope with the instantaneous frequency:

* IAFM (amplitude-frequency mapping): the point cloud (F[n], A[n]) keeping
  temporal pairing, so features can measure how envelope energy spreads
  across the momentary frequencies.
* IAFC (amplitude-frequency correlation): the full cross-correlation
  R_AF[k] = sum_n A[n] * F[n-k] over all 2N-1 lags, zero-padded.
* IEFD (energy-frequency distribution): the per-sample product of the
  energy-normalized squared envelope and the sum-normalized frequency.
"""

from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len

from .analytic import InstantaneousSeries
from .errors import DegenerateInputError


@dataclass
class Iafm:
    """Amplitude-frequency point cloud: freq[n] on x, amp[n] on y."""

    freq: np.ndarray
    amp: np.ndarray


@dataclass
class Iafc:
    """Full cross-correlation of amplitude against frequency.

    ``values[i]`` is R_AF at ``lags[i]``; lags run from -(N-1) to N-1.
    """

    lags: np.ndarray
    values: np.ndarray


@dataclass
class Iefd:
    """Per-sample product of normalized energy and normalized frequency."""

    values: np.ndarray
    ie_norm: np.ndarray
    if_norm: np.ndarray


def compute_iafm(series: InstantaneousSeries) -> Iafm:
    """Pair each sample's instantaneous frequency with its amplitude."""
    return Iafm(freq=series.ifreq, amp=series.ia)


def cross_correlate(amp: np.ndarray, freq: np.ndarray) -> Iafc:
    """Full cross-correlation R_AF[k] = sum_n amp[n] * freq[n-k].

    Indices outside [0, N-1] are treated as zero, giving 2N-1 lags. The sum
    is evaluated through a frequency-domain product (O(N log N)); it matches
    the direct double-sum within floating-point round-off.
    """
    amp = np.asarray(amp, dtype=np.float64)
    freq = np.asarray(freq, dtype=np.float64)
    n = amp.size
    if freq.size != n:
        raise ValueError(f"amplitude and frequency lengths differ: {n} vs {freq.size}")
    nfft = next_fast_len(2 * n - 1, real=True)
    spec_a = np.fft.rfft(amp, nfft)
    spec_f = np.fft.rfft(freq, nfft)
    circular = np.fft.irfft(spec_a * np.conj(spec_f), nfft)
    # circular[k] = sum_n amp[n] * freq[(n-k) mod nfft]; with nfft >= 2N-1 the
    # wrapped indices land in the zero padding, so rolling recovers the
    # linear correlation at lags -(N-1)..N-1.
    values = np.roll(circular, n - 1)[: 2 * n - 1]
    lags = np.arange(-(n - 1), n)
    return Iafc(lags=lags, values=values)


def compute_iafc(series: InstantaneousSeries) -> Iafc:
    """Cross-correlate the envelope with the instantaneous frequency."""
    return cross_correlate(series.ia, series.ifreq)


def normalized_distribution(amp: np.ndarray, freq: np.ndarray) -> Iefd:
    """Energy-frequency distribution from paired amplitude/frequency arrays.

    ie_norm[n] = amp[n]^2 / sum(amp^2), if_norm[n] = freq[n] / sum(freq),
    values[n] = ie_norm[n] * if_norm[n].

    Raises
    ------
    DegenerateInputError
        If the envelope is all zero or the frequency sums to zero.
    """
    amp = np.asarray(amp, dtype=np.float64)
    freq = np.asarray(freq, dtype=np.float64)
    energy = amp * amp
    energy_total = energy.sum()
    if energy_total == 0.0:
        raise DegenerateInputError("all-zero envelope: energy cannot be normalized")
    freq_total = freq.sum()
    if freq_total == 0.0:
        raise DegenerateInputError("zero-sum instantaneous frequency: cannot normalize")
    ie_norm = energy / energy_total
    if_norm = freq / freq_total
    return Iefd(values=ie_norm * if_norm, ie_norm=ie_norm, if_norm=if_norm)


def compute_iefd(series: InstantaneousSeries) -> Iefd:
    """Energy-frequency distribution of one instantaneous series."""
    return normalized_distribution(series.ia, series.ifreq)


def export_heatmap_data(series: InstantaneousSeries) -> np.ndarray:
    """Joint time-energy-frequency triples, one row (t, F[n], A[n]) per sample."""
    n = len(series)
    times = np.arange(n) / series.fs
    return np.column_stack([times, series.ifreq, series.ia])


def _format_value(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def rows_to_csv(header: str, rows) -> str:
    """Render tabular rows as comma-separated text with a header line.

    Plain '.' decimal formatting, '\\n' terminators, floats at round-trip
    precision.
    """
    lines = [header]
    for row in rows:
        lines.append(",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def heatmap_csv(series: InstantaneousSeries) -> str:
    """CSV text of the joint time-energy-frequency heatmap triples."""
    return rows_to_csv("time_s,freq_hz,energy", export_heatmap_data(series))


def iafm_csv(iafm: Iafm) -> str:
    """CSV text of the amplitude-frequency point cloud."""
    return rows_to_csv("freq_hz,amp", zip(iafm.freq, iafm.amp))


def iafc_csv(iafc: Iafc) -> str:
    """CSV text of the cross-correlation sequence over all lags."""
    return rows_to_csv("lag,value", zip(iafc.lags, iafc.values))


def iefd_csv(iefd: Iefd, fs: float) -> str:
    """CSV text of the energy-frequency distribution trace."""
    times = np.arange(iefd.values.size) / fs
    return rows_to_csv("time_s,value", zip(times, iefd.values))


def instantaneous_csv(series: InstantaneousSeries) -> str:
    """CSV text of the envelope and instantaneous-frequency traces."""
    times = np.arange(len(series)) / series.fs
    return rows_to_csv("time_s,ia,if_hz", zip(times, series.ia, series.ifreq))
