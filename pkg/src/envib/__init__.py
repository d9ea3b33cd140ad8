"""Envelope-based vibration analysis for bearing condition monitoring.

The package derives instantaneous amplitude/frequency information from raw
vibration segments, builds joint envelope representations from it, reduces
each segment to six summary features, and classifies segments with a
random forest. An STFT-of-envelope baseline, a synthetic benchmark
generator, and a CLI round out the pipeline.
"""

from .analytic import (
    InstantaneousSeries,
    Signal,
    analytic_transform,
    instantaneous_amplitude,
    instantaneous_frequency,
    instantaneous_phase,
    instantaneous_series,
)
from .classify import (
    EvalReport,
    ForestConfig,
    TrainedForest,
    binary_roc_auc,
    evaluate,
    load_forest,
    predict_proba,
    predict_proba_matrix,
    save_forest,
    train,
)
from .features import (
    FEATURE_NAMES,
    FeatureVector,
    coefficient_of_variation,
    correlation_peak,
    extract_features,
    mean_to_entropy_ratio,
    spectral_centroid,
    spectral_spread,
)
from .pipeline import (
    DiagnosticsReport,
    LabeledDataset,
    ManifestEntry,
    SynthConfig,
    build_dataset,
    load_manifest,
    load_recording,
    read_features_csv,
    segment,
    split,
    synth_generate,
    write_features_csv,
    write_raw_f64le,
)
from .representations import (
    Iafc,
    Iafm,
    Iefd,
    compute_iafc,
    compute_iafm,
    compute_iefd,
    cross_correlate,
    export_heatmap_data,
)
from .stft import StftEnvelopeSpectrum, extract_stft_features, stft_envelope_spectrum

__version__ = "0.1.0"
