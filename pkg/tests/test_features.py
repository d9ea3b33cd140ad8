"""Feature formulas, tie-breaking, scale behavior, and the extraction chain."""

import time

import numpy as np
import pytest

from envib import (
    FeatureVector,
    Signal,
    coefficient_of_variation,
    correlation_peak,
    cross_correlate,
    extract_features,
    instantaneous_series,
    mean_to_entropy_ratio,
    spectral_centroid,
    spectral_spread,
)
from envib.errors import DegenerateDistributionError, DegenerateInputError
from envib.representations import Iafc, Iafm, Iefd

from conftest import direct_cross_correlation, tone


def _iafm(freq, amp):
    return Iafm(freq=np.asarray(freq, float), amp=np.asarray(amp, float))


def _iefd(values):
    values = np.asarray(values, float)
    return Iefd(values=values, ie_norm=values, if_norm=np.ones_like(values))


# ---------------------------------------------------------------------------
# centroid / spread / CoV


def test_centroid_with_uniform_weights_is_the_mean():
    assert spectral_centroid(_iafm([10, 20, 30, 40], [1, 1, 1, 1])) == pytest.approx(25.0)


def test_centroid_with_single_support():
    assert spectral_centroid(_iafm([5, 10, 20], [0, 0, 1])) == pytest.approx(20.0)


def test_centroid_matches_direct_formula(rng):
    freq = rng.standard_normal(1000) * 50.0
    amp = rng.uniform(0.0, 1.0, 1000)
    expected = np.sum(freq * amp) / np.sum(amp)
    assert spectral_centroid(_iafm(freq, amp)) == pytest.approx(expected, rel=1e-12)


def test_centroid_rejects_zero_amplitude():
    with pytest.raises(DegenerateInputError):
        spectral_centroid(_iafm([1.0, 2.0], [0.0, 0.0]))


def test_spread_is_zero_for_constant_frequency():
    assert spectral_spread(_iafm([50, 50, 50], [1, 2, 3]), 50.0) == 0.0


def test_spread_two_point_case():
    iafm = _iafm([10.0, 20.0], [1.0, 1.0])
    sc = spectral_centroid(iafm)
    assert sc == pytest.approx(15.0)
    assert spectral_spread(iafm, sc) == pytest.approx(5.0)


def test_spread_matches_direct_formula(rng):
    freq = rng.standard_normal(1000) * 50.0
    amp = rng.uniform(0.0, 1.0, 1000)
    sc = spectral_centroid(_iafm(freq, amp))
    expected = np.sqrt(np.sum((freq - sc) ** 2 * amp) / np.sum(amp))
    assert spectral_spread(_iafm(freq, amp), sc) == pytest.approx(expected, rel=1e-12)


def test_spread_satisfies_koenig_huygens(rng):
    freq = rng.uniform(-100.0, 100.0, 500)
    amp = rng.uniform(0.0, 2.0, 500)
    sc = spectral_centroid(_iafm(freq, amp))
    ss = spectral_spread(_iafm(freq, amp), sc)
    moment = np.sum(freq**2 * amp) / np.sum(amp)
    assert ss**2 == pytest.approx(moment - sc**2, rel=1e-9)


def test_centroid_stays_inside_frequency_range(rng):
    for _ in range(10):
        freq = rng.uniform(-50.0, 200.0, 64)
        amp = rng.uniform(0.0, 1.0, 64)
        sc = spectral_centroid(_iafm(freq, amp))
        assert freq.min() <= sc <= freq.max()


def test_cov_definition():
    assert coefficient_of_variation(15.0, 5.0) == pytest.approx(100.0 / 3.0)
    assert coefficient_of_variation(15.0, 0.0) == 0.0


def test_cov_rejects_zero_centroid():
    with pytest.raises(DegenerateInputError):
        coefficient_of_variation(0.0, 1.0)


# ---------------------------------------------------------------------------
# correlation peak


def test_peak_of_identical_inputs_is_at_zero_lag():
    cp, pl = correlation_peak(cross_correlate([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]))
    assert cp == pytest.approx(14.0, abs=1e-9)
    assert pl == 0


def test_peak_of_shifted_delta():
    cp, pl = correlation_peak(cross_correlate([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]))
    assert cp == pytest.approx(1.0, abs=1e-9)
    assert pl == -2


def test_peak_matches_brute_force_argmax(rng):
    for n in (16, 100, 500):
        amp = rng.uniform(0.0, 1.0, n)
        freq = rng.standard_normal(n) * 30.0
        cp, pl = correlation_peak(cross_correlate(amp, freq))
        lags, values = direct_cross_correlation(amp, freq)
        i = np.argmax(values)
        assert pl == lags[i]
        assert cp == pytest.approx(values[i], rel=1e-9)


def test_peak_ties_prefer_smallest_absolute_lag():
    iafc = Iafc(lags=np.array([-2, -1, 0, 1, 2]), values=np.array([1.0, 5.0, 5.0, 5.0, 1.0]))
    assert correlation_peak(iafc) == (5.0, 0)


def test_peak_exact_sign_tie_resolves_negative():
    iafc = Iafc(lags=np.array([-2, -1, 0, 1, 2]), values=np.array([1.0, 5.0, 2.0, 5.0, 1.0]))
    assert correlation_peak(iafc) == (5.0, -1)


# ---------------------------------------------------------------------------
# mean-to-entropy ratio


def test_mer_two_level_distribution_has_unit_entropy():
    values = np.array([0.25, 0.75] * 8)
    assert mean_to_entropy_ratio(_iefd(values)) == pytest.approx(values.mean(), rel=1e-12)


def test_mer_all_distinct_values(rng):
    n = 100
    values = rng.permutation(np.arange(1, n + 1) / n**2)
    expected = values.mean() / np.log2(n)
    assert mean_to_entropy_ratio(_iefd(values)) == pytest.approx(expected, rel=1e-12)


def test_mer_rejects_constant_distribution():
    with pytest.raises(DegenerateDistributionError):
        mean_to_entropy_ratio(_iefd(np.full(32, 0.125)))


def test_mer_optional_binning_coarsens_values():
    # two tight clusters: exact uniqueness sees 32 values, 2 bins see 1 bit
    values = np.concatenate([1.0 + np.arange(16) * 1e-6, 2.0 + np.arange(16) * 1e-6])
    exact = mean_to_entropy_ratio(_iefd(values))
    binned = mean_to_entropy_ratio(_iefd(values), bins=2)
    assert exact == pytest.approx(values.mean() / 5.0, rel=1e-12)
    assert binned == pytest.approx(values.mean() / 1.0, rel=1e-9)


# ---------------------------------------------------------------------------
# end-to-end extraction


def test_tone_features_sit_at_tone_frequency():
    f0 = 8000.0
    features = extract_features(tone(f0))
    assert abs(features.sc - f0) < 0.01 * f0
    assert features.ss < 0.05 * f0
    assert features.pl == 0


def test_feature_vector_serialization_order():
    features = FeatureVector(ss=1.0, sc=2.0, cov=3.0, cp=4.0, pl=-5, mer=6.0)
    assert features.csv_fields() == ["1", "2", "3", "4", "-5", "6"]
    assert np.array_equal(features.as_array(), [1.0, 2.0, 3.0, 4.0, -5.0, 6.0])


def test_features_are_deterministic(rng):
    x = rng.standard_normal(1024)
    a = extract_features(Signal(x.copy(), 64000.0))
    b = extract_features(Signal(x.copy(), 64000.0))
    assert a == b


def test_scale_covariance_bundle(rng):
    for _ in range(5):
        x = rng.standard_normal(1024)
        base = extract_features(Signal(x, 64000.0))
        for c in (0.5, 3.0, 1e4):
            scaled = extract_features(Signal(c * x, 64000.0))
            assert scaled.sc == pytest.approx(base.sc, rel=1e-9)
            assert scaled.ss == pytest.approx(base.ss, rel=1e-9)
            assert scaled.cov == pytest.approx(base.cov, rel=1e-9)
            assert scaled.mer == pytest.approx(base.mer, rel=1e-9)
            assert scaled.cp == pytest.approx(c * base.cp, rel=1e-9)
            assert scaled.pl == base.pl


def test_degenerate_segment_raises():
    with pytest.raises(DegenerateInputError):
        extract_features(Signal(np.zeros(64), 64000.0))


def test_single_extraction_meets_latency_budget():
    signal = tone()
    extract_features(signal)  # warm-up
    start = time.perf_counter()
    extract_features(signal)
    assert time.perf_counter() - start <= 0.16
