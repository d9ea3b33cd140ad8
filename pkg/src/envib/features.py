"""Six summary features computed from the joint envelope representations.

From the amplitude-frequency cloud: spectral centroid (SC), spectral spread
(SS), and their ratio as a percentage (CoV). From the cross-correlation:
peak value (CP) and peak lag (PL). From the energy-frequency distribution:
the mean-to-entropy ratio (MER). The serialized order is fixed:
[SS, SC, CoV, CP, PL, MER].
"""

from dataclasses import dataclass

import numpy as np

from .analytic import Signal, instantaneous_series
from .errors import DegenerateDistributionError, DegenerateInputError
from .representations import (
    Iafc,
    Iafm,
    Iefd,
    compute_iafc,
    compute_iafm,
    compute_iefd,
)

FEATURE_NAMES = ["ss", "sc", "cov", "cp", "pl", "mer"]


@dataclass
class FeatureVector:
    """One segment's six features, in serialization order."""

    ss: float
    sc: float
    cov: float
    cp: float
    pl: int
    mer: float

    def as_array(self) -> np.ndarray:
        return np.array([self.ss, self.sc, self.cov, self.cp, self.pl, self.mer])

    def csv_fields(self) -> list:
        """Fields at full double precision (17 significant digits)."""
        return [
            format(self.ss, ".17g"),
            format(self.sc, ".17g"),
            format(self.cov, ".17g"),
            format(self.cp, ".17g"),
            str(int(self.pl)),
            format(self.mer, ".17g"),
        ]


def spectral_centroid(iafm: Iafm) -> float:
    """Amplitude-weighted mean frequency of the cloud, in Hz."""
    total = iafm.amp.sum()
    if total == 0.0:
        raise DegenerateInputError("all-zero amplitude: centroid undefined")
    return float((iafm.freq * iafm.amp).sum() / total)


def spectral_spread(iafm: Iafm, sc: float) -> float:
    """Amplitude-weighted standard deviation of frequency about the centroid."""
    total = iafm.amp.sum()
    if total == 0.0:
        raise DegenerateInputError("all-zero amplitude: spread undefined")
    dev = iafm.freq - sc
    return float(np.sqrt((dev * dev * iafm.amp).sum() / total))


def coefficient_of_variation(sc: float, ss: float) -> float:
    """Spread-to-centroid ratio as a percentage."""
    if sc == 0.0:
        raise DegenerateInputError("zero spectral centroid: CoV undefined")
    return ss / sc * 100.0


def correlation_peak(iafc: Iafc) -> tuple[float, int]:
    """Maximum cross-correlation value and the lag where it occurs.

    Ties are broken toward the smallest absolute lag, and an exact +/- tie
    resolves to the negative lag, so the result is deterministic.
    """
    cp = iafc.values.max()
    candidates = iafc.lags[iafc.values == cp]
    pl = min(candidates, key=lambda lag: (abs(lag), lag))
    return float(cp), int(pl)


def mean_to_entropy_ratio(iefd: Iefd, bins: int | None = None) -> float:
    """Mean of the distribution divided by the Shannon entropy of its values.

    The entropy is -sum_i P(x_i) * log2 P(x_i) over the empirical
    probabilities of the distinct values x_i. By default distinct means
    bit-level distinct; pass ``bins`` to coarsen the values into that many
    equal-width bins first (for sensitivity studies).

    Raises
    ------
    DegenerateDistributionError
        If the entropy is zero (all values identical).
    """
    values = iefd.values
    n = values.size
    if bins is None:
        _, counts = np.unique(values, return_counts=True)
    else:
        counts, _ = np.histogram(values, bins=bins)
        counts = counts[counts > 0]
    p = counts / n
    entropy = float(-(p * np.log2(p)).sum())
    if entropy == 0.0:
        raise DegenerateDistributionError(
            "zero-entropy distribution: mean-to-entropy ratio undefined"
        )
    mean = float(values.sum() / n)
    return mean / entropy


def features_from_parts(iafm: Iafm, iafc: Iafc, iefd: Iefd) -> FeatureVector:
    """Assemble the six features from prebuilt representations."""
    sc = spectral_centroid(iafm)
    ss = spectral_spread(iafm, sc)
    cov = coefficient_of_variation(sc, ss)
    cp, pl = correlation_peak(iafc)
    mer = mean_to_entropy_ratio(iefd)
    return FeatureVector(ss=ss, sc=sc, cov=cov, cp=cp, pl=pl, mer=mer)


def extract_features(signal: Signal) -> FeatureVector:
    """End-to-end feature vector of one vibration segment.

    Runs the analytic decomposition, builds the three representations, and
    evaluates the six features.
    """
    series = instantaneous_series(signal)
    return features_from_parts(
        compute_iafm(series), compute_iafc(series), compute_iefd(series)
    )
