"""Discrete analytic signal and instantaneous amplitude/phase/frequency.

The analytic signal is computed with the frequency-domain method: forward
FFT, zero the negative-frequency half, double the positive half, keep DC
(and Nyquist for even lengths) at unit gain, inverse FFT. Amplitude, phase,
and frequency are then per-sample functions of the complex result.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSignalError, SignalTooShortError

MIN_SAMPLES = 16


@dataclass
class Signal:
    """A finite real vibration segment with its sampling rate.

    Parameters
    ----------
    samples : np.ndarray
        Real acceleration samples (arbitrary units). Coerced to float64.
    fs : float
        Sampling rate in Hz, > 0.

    Raises
    ------
    SignalTooShortError
        If fewer than 16 samples.
    InvalidSignalError
        If fs <= 0 or any sample is NaN/Inf.
    """

    samples: np.ndarray
    fs: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise InvalidSignalError(f"samples must be 1-D, got shape {self.samples.shape}")
        if self.samples.size < MIN_SAMPLES:
            raise SignalTooShortError(
                f"signal has {self.samples.size} samples, minimum is {MIN_SAMPLES}"
            )
        if not self.fs > 0:
            raise InvalidSignalError(f"sampling rate must be positive, got {self.fs}")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidSignalError("signal contains non-finite samples")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Segment duration in seconds."""
        return self.samples.size / self.fs


@dataclass
class InstantaneousSeries:
    """Per-sample envelope, unwrapped phase, and frequency of one segment.

    All three arrays have the same length as the originating signal so that
    downstream sums over n stay aligned. ``zero_magnitude_count`` reports how
    many analytic samples had zero magnitude (their phase is defined as 0).
    """

    ia: np.ndarray
    ip: np.ndarray
    ifreq: np.ndarray
    fs: float
    zero_magnitude_count: int = field(default=0)

    def __post_init__(self):
        self.ia = np.asarray(self.ia, dtype=np.float64)
        self.ip = np.asarray(self.ip, dtype=np.float64)
        self.ifreq = np.asarray(self.ifreq, dtype=np.float64)
        n = self.ia.size
        if self.ip.size != n or self.ifreq.size != n:
            raise InvalidSignalError(
                f"series arrays must share one length, got {n}/{self.ip.size}/{self.ifreq.size}"
            )
        if np.any(self.ia < 0):
            raise InvalidSignalError("instantaneous amplitude must be non-negative")

    def __len__(self) -> int:
        return self.ia.size


def analytic_transform(signal: Signal) -> np.ndarray:
    """Compute the discrete analytic signal x_a[n] = x[n] + j*H{x[n]}.

    Parameters
    ----------
    signal : Signal
        Validated input segment.

    Returns
    -------
    np.ndarray
        Complex array of the same length; real part reproduces the input.
    """
    x = signal.samples
    n = x.size
    spectrum = np.fft.fft(x)
    gain = np.zeros(n)
    if n % 2 == 0:
        gain[0] = 1.0
        gain[1 : n // 2] = 2.0
        gain[n // 2] = 1.0
    else:
        gain[0] = 1.0
        gain[1 : (n + 1) // 2] = 2.0
    return np.fft.ifft(spectrum * gain)


def instantaneous_amplitude(analytic: np.ndarray) -> np.ndarray:
    """Envelope A[n]: element-wise magnitude of the analytic signal."""
    return np.abs(analytic)


def instantaneous_phase(analytic: np.ndarray) -> np.ndarray:
    """Unwrapped phase of the analytic signal.

    The four-quadrant angle is unwrapped by adding/subtracting 2*pi whenever
    successive raw angles jump by more than pi. Samples with zero magnitude
    get a raw angle of 0.
    """
    return np.unwrap(np.angle(analytic))


def instantaneous_frequency(ip: np.ndarray, fs: float) -> np.ndarray:
    """Instantaneous frequency F[n] in Hz from the unwrapped phase.

    Central differences on the interior, one-sided differences at the two
    endpoints; output keeps the input length. Negative values are passed
    through unmodified.
    """
    return np.gradient(ip) * (fs / (2.0 * np.pi))


def zero_magnitude_count(analytic: np.ndarray) -> int:
    """Number of analytic samples with exactly zero magnitude."""
    return int(np.count_nonzero(analytic == 0))


def instantaneous_series(signal: Signal) -> InstantaneousSeries:
    """Full instantaneous decomposition of one segment.

    Chains the analytic transform with the amplitude, phase, and frequency
    derivations and records the zero-magnitude diagnostic.
    """
    analytic = analytic_transform(signal)
    ia = instantaneous_amplitude(analytic)
    ip = instantaneous_phase(analytic)
    ifreq = instantaneous_frequency(ip, signal.fs)
    return InstantaneousSeries(
        ia=ia,
        ip=ip,
        ifreq=ifreq,
        fs=signal.fs,
        zero_magnitude_count=zero_magnitude_count(analytic),
    )
