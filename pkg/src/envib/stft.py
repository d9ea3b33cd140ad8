"""STFT-of-envelope baseline features.

The comparison method replaces the instantaneous series with a short-time
spectrum of the envelope: the envelope is split into three half-overlapping
Hamming windows, each is transformed with a fixed FFT size, and the squared
magnitudes are averaged per bin. The six features are then evaluated with
the aggregated power playing the amplitude role and the bin frequencies
playing the frequency role.
"""

from dataclasses import dataclass

import numpy as np

from .analytic import Signal, analytic_transform, instantaneous_amplitude
from .errors import InvalidLengthError
from .features import FeatureVector, features_from_parts
from .representations import Iafm, cross_correlate, normalized_distribution

DEFAULT_NFFT = 4096


@dataclass
class StftEnvelopeSpectrum:
    """One-sided aggregated power spectrum of the envelope."""

    bin_freqs: np.ndarray
    agg_power: np.ndarray


def stft_envelope_spectrum(signal: Signal, nfft: int = DEFAULT_NFFT) -> StftEnvelopeSpectrum:
    """Aggregate envelope power over three half-overlapping Hamming windows.

    The window length is N/2 with hop N/4 (offsets 0, N/4, N/2), so the
    three windows tile the segment with 50% pairwise overlap. Each windowed
    slice is transformed with ``nfft`` points (zero-padded or truncated as
    needed); ``agg_power`` is the per-bin mean of the squared magnitudes.

    Raises
    ------
    InvalidLengthError
        If the length is not divisible into the three windows.
    """
    n = len(signal)
    if n % 4 != 0:
        raise InvalidLengthError(
            f"length {n} does not split into 3 half-overlapping windows (need N % 4 == 0)"
        )
    envelope = instantaneous_amplitude(analytic_transform(signal))
    win_len = n // 2
    hop = n // 4
    window = np.hamming(win_len)
    power = np.zeros(nfft // 2 + 1)
    for offset in (0, hop, 2 * hop):
        weighted = envelope[offset : offset + win_len] * window
        spectrum = np.fft.rfft(weighted, n=nfft)
        power += np.abs(spectrum) ** 2
    agg_power = power / 3.0
    bin_freqs = np.arange(nfft // 2 + 1) * (signal.fs / nfft)
    return StftEnvelopeSpectrum(bin_freqs=bin_freqs, agg_power=agg_power)


def extract_stft_features(signal: Signal, nfft: int = DEFAULT_NFFT) -> FeatureVector:
    """Six features of the envelope's aggregated short-time spectrum.

    Identical formulas and output shape as the instantaneous path, with
    amplitude := aggregated power per bin and frequency := bin frequency.
    """
    spec = stft_envelope_spectrum(signal, nfft=nfft)
    iafm = Iafm(freq=spec.bin_freqs, amp=spec.agg_power)
    iafc = cross_correlate(spec.agg_power, spec.bin_freqs)
    iefd = normalized_distribution(spec.agg_power, spec.bin_freqs)
    return features_from_parts(iafm, iafc, iefd)
