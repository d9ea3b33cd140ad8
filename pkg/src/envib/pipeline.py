"""Dataset plumbing: ingestion, segmentation, synthesis, and splits.

Recordings come from converted plain formats (single-column CSV, raw
little-endian float64, or mono WAV), get cut into non-overlapping segments,
and each segment is reduced to one feature row. A synthetic four-class
generator provides a reproducible desk-scale benchmark with the same class
structure as a typical bearing test rig: one healthy class and three fault
classes that amplitude-modulate the carrier at characteristic rates.
"""

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic import Signal
from .errors import (
    ConfigError,
    DegenerateInputError,
    EmptyDatasetError,
    IngestionError,
    StratificationError,
)
from .features import FEATURE_NAMES, FeatureVector, extract_features
from .stft import extract_stft_features

FORMATS = ("csv-column", "raw-f64le", "wav-pcm")
METHODS = ("proposed", "stft")

FEATURES_CSV_HEADER = "source,segment,label," + ",".join(FEATURE_NAMES) + ",method"


@dataclass
class ManifestEntry:
    """One recording reference: where it lives and how to read it."""

    path: Path
    label: str
    fs: float
    format: str


@dataclass
class DatasetRow:
    """One feature row with its provenance."""

    source: str
    segment: int
    label: str
    features: FeatureVector


@dataclass
class LabeledDataset:
    """Feature rows plus the ordered class set they draw labels from."""

    rows: list
    class_names: list
    method: str = "proposed"

    def __len__(self) -> int:
        return len(self.rows)

    def to_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """Feature matrix (n, 6) and integer class indices."""
        x = np.array([row.features.as_array() for row in self.rows])
        index = {name: i for i, name in enumerate(self.class_names)}
        y = np.array([index[row.label] for row in self.rows], dtype=np.intp)
        return x, y


@dataclass
class DiagnosticsReport:
    """Counts and reasons for segments dropped during feature extraction."""

    total_segments: int = 0
    kept: int = 0
    dropped: list = field(default_factory=list)
    short_recordings: list = field(default_factory=list)

    def to_text(self) -> str:
        lines = [
            "feature extraction diagnostics",
            f"segments total:   {self.total_segments}",
            f"segments kept:    {self.kept}",
            f"segments dropped: {len(self.dropped)}",
        ]
        for source, seg, reason in self.dropped:
            lines.append(f"  dropped {source}[{seg}]: {reason}")
        for source, n in self.short_recordings:
            lines.append(f"  skipped {source}: only {n} samples, shorter than one segment")
        return "\n".join(lines) + "\n"


def segment(recording: Signal, segment_len: int) -> list:
    """Cut a recording into consecutive non-overlapping segments.

    The trailing remainder shorter than ``segment_len`` is discarded. A
    recording shorter than one segment yields an empty list with a warning.
    """
    if segment_len < 16:
        raise ConfigError(f"segment length must be >= 16, got {segment_len}")
    n = len(recording)
    count = n // segment_len
    if count == 0:
        warnings.warn(
            f"recording of {n} samples is shorter than one {segment_len}-sample segment",
            stacklevel=2,
        )
        return []
    return [
        Signal(recording.samples[i * segment_len : (i + 1) * segment_len], recording.fs)
        for i in range(count)
    ]


# ---------------------------------------------------------------------------
# Recording ingestion


def _load_csv_column(path: Path, fs: float) -> Signal:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise IngestionError(f"{path}: empty file")
    start = 0
    try:
        float(lines[0].strip())
    except ValueError:
        start = 1  # header line
    if start == 1 and len(lines) == 1:
        raise IngestionError(f"{path}: header only, no data rows")
    for lineno, line in enumerate(lines[start:], start=start + 1):
        text = line.strip()
        if not text:
            continue
        if "," in text:
            raise IngestionError(f"{path}: line {lineno}: expected a single column")
        try:
            values.append(float(text))
        except ValueError:
            raise IngestionError(f"{path}: line {lineno}: non-numeric cell {text!r}") from None
    if not values:
        raise IngestionError(f"{path}: no numeric rows")
    return Signal(np.array(values), fs)


def _load_raw_f64le(path: Path, fs: float) -> Signal:
    data = Path(path).read_bytes()
    if not data:
        raise IngestionError(f"{path}: empty file")
    if len(data) % 8 != 0:
        raise IngestionError(
            f"{path}: size {len(data)} is not a multiple of 8 bytes "
            f"(trailing partial value at byte {len(data) - len(data) % 8})"
        )
    return Signal(np.frombuffer(data, dtype="<f8"), fs)


def _load_wav_pcm(path: Path, fs: float) -> Signal:
    from scipy.io import wavfile

    try:
        rate, data = wavfile.read(path)
    except Exception as exc:
        raise IngestionError(f"{path}: unreadable WAV file: {exc}") from exc
    if data.ndim != 1:
        raise IngestionError(f"{path}: expected a single channel, got {data.shape[1]}")
    if fs and abs(rate - fs) > 1e-9:
        raise IngestionError(f"{path}: WAV rate {rate} Hz conflicts with declared {fs} Hz")
    if data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    elif data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    else:
        samples = data.astype(np.float64)
    return Signal(samples, float(rate))


def load_recording(path, format: str, fs: float) -> Signal:
    """Load one recording file into a Signal.

    ``format`` selects the parser: ``csv-column`` (one numeric column,
    header optional), ``raw-f64le`` (little-endian 8-byte floats), or
    ``wav-pcm`` (mono; integer PCM normalized to [-1, 1]).
    """
    path = Path(path)
    if format == "csv-column":
        return _load_csv_column(path, fs)
    if format == "raw-f64le":
        return _load_raw_f64le(path, fs)
    if format == "wav-pcm":
        return _load_wav_pcm(path, fs)
    raise ConfigError(f"unknown recording format {format!r}, expected one of {FORMATS}")


def write_raw_f64le(samples: np.ndarray, path) -> None:
    """Write samples as little-endian float64, the raw ingestion format."""
    Path(path).write_bytes(np.asarray(samples, dtype="<f8").tobytes())


def load_manifest(path) -> list:
    """Read a JSON manifest of recordings and check every path is readable.

    Relative entry paths are resolved against the manifest's directory.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise IngestionError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise IngestionError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "entries" not in payload:
        raise IngestionError(f"{path}: manifest must be an object with an 'entries' array")
    entries = []
    for i, raw in enumerate(payload["entries"]):
        try:
            entry = ManifestEntry(
                path=Path(raw["path"]),
                label=str(raw["label"]),
                fs=float(raw["fs"]),
                format=str(raw["format"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise IngestionError(f"{path}: entry {i}: {exc}") from exc
        if entry.format not in FORMATS:
            raise IngestionError(f"{path}: entry {i}: unknown format {entry.format!r}")
        if not entry.path.is_absolute():
            entry.path = path.parent / entry.path
        if not entry.path.is_file():
            raise IngestionError(f"{path}: entry {i}: missing recording {entry.path}")
        entries.append(entry)
    return entries


# ---------------------------------------------------------------------------
# Synthetic benchmark generator


@dataclass
class SynthConfig:
    """Recipe parameters for the four-class synthetic benchmark.

    Fault impacts are modeled as periodic resonance bursts: each impact adds
    an exponentially decaying unit pulse to the envelope, repeating at the
    fault rate, scaled by ``depth``. The decay time constant is a property
    of the structure, so classes with different fault rates differ in burst
    duty cycle, which is what the envelope features respond to.
    """

    fs: float = 64000.0
    segment_len: int = 6400
    carrier_hz: float = 8000.0
    f_ir: float = 123.0
    f_or: float = 76.0
    depth: float = 0.5
    snr_db: float = 10.0
    burst_decay_s: float = 0.002


SYNTH_CLASS_NAMES = ("healthy", "combined_ir_or", "inner_race", "outer_race")


def _burst_train(t: np.ndarray, rate: float, decay_s: float, offset: float) -> np.ndarray:
    """Periodic exponential bursts at ``rate`` Hz, first impact at offset*period."""
    period = 1.0 / rate
    out = np.zeros_like(t)
    k = -1  # include the previous period's tail
    while True:
        t_k = (k + offset) * period
        if t_k > t[-1]:
            break
        mask = t >= t_k
        out[mask] += np.exp(-(t[mask] - t_k) / decay_s)
        k += 1
    return out


def _synth_one(label: str, config: SynthConfig, rng: np.random.Generator) -> Signal:
    n = config.segment_len
    t = np.arange(n) / config.fs
    carrier = np.cos(2.0 * np.pi * config.carrier_hz * t + rng.uniform(0.0, 2.0 * np.pi))
    modulation = np.ones(n)
    rates = {
        "healthy": (),
        "combined_ir_or": (config.f_ir, config.f_or),
        "inner_race": (config.f_ir,),
        "outer_race": (config.f_or,),
    }[label]
    for rate in rates:
        modulation += config.depth * _burst_train(
            t, rate, config.burst_decay_s, rng.uniform(0.0, 1.0)
        )
    clean = modulation * carrier
    noise_power = float(np.mean(clean**2)) / (10.0 ** (config.snr_db / 10.0))
    samples = clean + rng.normal(0.0, np.sqrt(noise_power), n)
    return Signal(samples, config.fs)


def synth_generate(
    count_per_class: int, seed: int, config: SynthConfig | None = None
) -> list:
    """Generate ``count_per_class`` labeled segments for each of the 4 classes.

    Deterministic for a given seed: the same seed always reproduces the same
    bits. Returns (Signal, label) pairs in class order.
    """
    if count_per_class <= 0:
        raise ConfigError(f"count per class must be positive, got {count_per_class}")
    config = config or SynthConfig()
    rng = np.random.default_rng(seed)
    out = []
    for label in SYNTH_CLASS_NAMES:
        for _ in range(count_per_class):
            out.append((_synth_one(label, config, rng), label))
    return out


# ---------------------------------------------------------------------------
# Batch feature extraction


def _method_fn(method: str):
    if method == "proposed":
        return extract_features
    if method == "stft":
        return extract_stft_features
    raise ConfigError(f"unknown method {method!r}, expected one of {METHODS}")


def build_dataset(
    source,
    segment_len: int = 6400,
    method: str = "proposed",
    workers: int = 1,
) -> tuple[LabeledDataset, DiagnosticsReport]:
    """Extract one feature row per segment of every recording.

    ``source`` is either a list of manifest entries or a list of
    (Signal, label) pairs (the synthetic generator's output). Segments that
    raise a degenerate-input error are dropped and counted in the
    diagnostics report; the row order is fixed by source order then segment
    index regardless of the worker count.
    """
    extract = _method_fn(method)
    tasks = []  # (source_id, segment_index, label, Signal)
    report = DiagnosticsReport()
    for item in source:
        if isinstance(item, ManifestEntry):
            source_id = str(item.path)
            recording = load_recording(item.path, item.format, item.fs)
            label = item.label
        else:
            recording, label = item
            source_id = f"synth-{len(tasks):05d}"
            label = str(label)
        pieces = []
        if len(recording) < segment_len:
            report.short_recordings.append((source_id, len(recording)))
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                pieces = segment(recording, segment_len)
        for idx, piece in enumerate(pieces):
            tasks.append((source_id, idx, label, piece))

    report.total_segments = len(tasks)

    def run(task):
        source_id, idx, label, piece = task
        try:
            return DatasetRow(source_id, idx, label, extract(piece))
        except DegenerateInputError as exc:
            return (source_id, idx, str(exc))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    rows = []
    for result in results:
        if isinstance(result, DatasetRow):
            rows.append(result)
        else:
            report.dropped.append(result)
    report.kept = len(rows)
    if tasks and not rows:
        raise EmptyDatasetError("every segment was degenerate; nothing to extract")
    class_names = sorted({row.label for row in rows})
    return LabeledDataset(rows=rows, class_names=class_names, method=method), report


def split(
    dataset: LabeledDataset, train_fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Deterministic stratified split into train and test subsets.

    Each class contributes floor(train_fraction * n_class) rows to the
    training set (within one row of the exact proportion), so the test side
    always keeps at least one row per class.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train fraction must be in (0, 1), got {train_fraction}")
    by_class = {}
    for i, row in enumerate(dataset.rows):
        by_class.setdefault(row.label, []).append(i)
    for label, indices in by_class.items():
        if len(indices) < 2:
            raise StratificationError(f"class {label!r} has {len(indices)} row(s), need >= 2")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for label in sorted(by_class):
        indices = np.array(by_class[label])
        order = rng.permutation(indices.size)
        n_train = int(np.floor(train_fraction * indices.size))
        train_idx.extend(indices[order[:n_train]])
        test_idx.extend(indices[order[n_train:]])
    train_rows = [dataset.rows[i] for i in sorted(train_idx)]
    test_rows = [dataset.rows[i] for i in sorted(test_idx)]
    return (
        LabeledDataset(train_rows, list(dataset.class_names), dataset.method),
        LabeledDataset(test_rows, list(dataset.class_names), dataset.method),
    )


# ---------------------------------------------------------------------------
# Feature matrix CSV


def write_features_csv(dataset: LabeledDataset, path) -> None:
    """Write the feature matrix with provenance columns and a method tag."""
    lines = [FEATURES_CSV_HEADER]
    for row in dataset.rows:
        fields = [row.source, str(row.segment), row.label]
        fields.extend(row.features.csv_fields())
        fields.append(dataset.method)
        lines.append(",".join(fields))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_features_csv(path) -> LabeledDataset:
    """Read a feature matrix written by :func:`write_features_csv`."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise IngestionError(f"feature file not found: {path}") from None
    if not lines:
        raise IngestionError(f"{path}: empty feature file")
    legacy_header = FEATURES_CSV_HEADER.rsplit(",", 1)[0]
    if lines[0] == FEATURES_CSV_HEADER:
        has_method = True
    elif lines[0] == legacy_header:
        has_method = False
    else:
        raise IngestionError(f"{path}: unexpected header {lines[0]!r}")
    rows = []
    method = "proposed"
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        expected = 10 if has_method else 9
        if len(fields) != expected:
            raise IngestionError(f"{path}: line {lineno}: expected {expected} fields")
        try:
            features = FeatureVector(
                ss=float(fields[3]),
                sc=float(fields[4]),
                cov=float(fields[5]),
                cp=float(fields[6]),
                pl=int(fields[7]),
                mer=float(fields[8]),
            )
        except ValueError as exc:
            raise IngestionError(f"{path}: line {lineno}: {exc}") from exc
        if has_method:
            method = fields[9]
        rows.append(DatasetRow(fields[0], int(fields[1]), fields[2], features))
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    class_names = sorted({row.label for row in rows})
    return LabeledDataset(rows=rows, class_names=class_names, method=method)
