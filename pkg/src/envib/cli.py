"""Command-line entry point wiring the full pipeline.

Subcommands: ``synth`` (generate the benchmark corpus), ``extract``
(recordings -> feature CSV), ``train-eval`` (feature CSV -> trained model +
evaluation report), ``bench`` (latency/scaling/memory measurements), and
``plot-data`` (per-representation CSV exports for external plotting).

Defaults reproduce the reference protocol: 6400-sample segments at
64 kHz, 70/30 stratified split, seed 42, 100-tree forest. Exit codes:
0 success, 2 configuration error, 3 ingestion error, 4 degenerate math.
"""

import argparse
import json
import os
import platform
import statistics
import sys
import time
import tracemalloc
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import Signal, instantaneous_series
from .classify import ForestConfig, evaluate, predict_proba_matrix, save_forest, train
from .errors import (
    ConfigError,
    DegenerateInputError,
    EmptyDatasetError,
    EnvibError,
    IngestionError,
    InvalidLengthError,
    InvalidSignalError,
    StratificationError,
)
from .features import extract_features
from .pipeline import (
    FORMATS,
    METHODS,
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
    compute_iafc,
    compute_iafm,
    compute_iefd,
    heatmap_csv,
    iafc_csv,
    iafm_csv,
    iefd_csv,
    instantaneous_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INGESTION = 3
EXIT_DEGENERATE = 4

BENCH_SIZES = (1600, 3200, 6400, 12800, 25600)


def _env_int(name: str, fallback: int) -> int:
    value = os.environ.get(name)
    if value is None or value == "":
        return fallback
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"environment variable {name} must be an integer, got {value!r}")


def _default_seed() -> int:
    return _env_int("ENVIB_SEED", 42)


def _default_workers() -> int:
    return _env_int("ENVIB_WORKERS", os.cpu_count() or 1)


def _forest_config(args) -> ForestConfig:
    return ForestConfig(
        n_trees=args.trees,
        max_depth=None if args.max_depth == 0 else args.max_depth,
        min_leaf=args.min_leaf,
        features_per_split=args.features_per_split,
        seed=args.seed,
    )


# ---------------------------------------------------------------------------
# extract


def cmd_extract(args) -> int:
    entries = load_manifest(args.manifest)
    dataset, report = build_dataset(
        entries, segment_len=args.segment_len, method=args.method, workers=args.workers
    )
    write_features_csv(dataset, args.out)
    diagnostics = args.diagnostics or (str(args.out) + ".diag.txt")
    Path(diagnostics).write_text(report.to_text(), encoding="utf-8")
    flag = " (partial: some segments dropped)" if report.dropped else ""
    print(
        f"wrote {len(dataset)} feature rows to {args.out} "
        f"({report.kept}/{report.total_segments} segments kept){flag}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# train-eval


def _predictions_csv(forest, test_set) -> str:
    x = np.array([row.features.as_array() for row in test_set.rows])
    proba = predict_proba_matrix(forest, x)
    preds = np.argmax(proba, axis=1)
    header = "source,segment,label,predicted," + ",".join(
        f"p_{name}" for name in forest.class_names
    )
    lines = [header]
    for row, pred, p in zip(test_set.rows, preds, proba):
        fields = [row.source, str(row.segment), row.label, forest.class_names[pred]]
        fields.extend(format(v, ".17g") for v in p)
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def cmd_train_eval(args) -> int:
    dataset = read_features_csv(args.features)
    train_set, test_set = split(dataset, args.split, args.seed)
    forest = train(train_set, _forest_config(args))
    report = evaluate(forest, test_set)

    header = (
        f"split: train={len(train_set)} test={len(test_set)} "
        f"fraction={args.split} seed={args.seed} method={dataset.method}\n"
    )
    text = header + report.to_text()
    print(text, end="")
    Path(args.out_report).write_text(text, encoding="utf-8")
    if args.out_model:
        save_forest(forest, args.out_model)
    if args.out_predictions:
        Path(args.out_predictions).write_text(
            _predictions_csv(forest, test_set), encoding="utf-8"
        )
    if args.out_confusion:
        Path(args.out_confusion).write_text(report.confusion_csv(), encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench


def measure_latency(n: int, fs: float, runs: int, seed: int = 42) -> tuple[float, float]:
    """Median and p95 wall time of one full feature extraction at length n."""
    rng = np.random.default_rng([seed, n])
    signal = Signal(rng.standard_normal(n), fs)
    extract_features(signal)  # warm-up: FFT plan caches, allocator
    times = []
    for _ in range(runs):
        start = time.perf_counter()
        extract_features(signal)
        times.append(time.perf_counter() - start)
    return statistics.median(times), float(np.percentile(times, 95))


def fit_scaling_exponent(sizes, medians) -> float:
    """Slope of log(time) against log(n log n): ~1.0 for n log n scaling."""
    x = np.log(np.array(sizes) * np.log(sizes))
    y = np.log(medians)
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def peak_extraction_memory(n: int, fs: float, seed: int = 42) -> int:
    """Allocator high-water mark (bytes) of one feature extraction."""
    rng = np.random.default_rng([seed, n])
    signal = Signal(rng.standard_normal(n), fs)
    extract_features(signal)
    tracemalloc.start()
    extract_features(signal)
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    return peak


def cmd_bench(args) -> int:
    sizes = args.sizes or list(BENCH_SIZES)
    rows = []
    for n in sizes:
        median_s, p95_s = measure_latency(n, args.fs, args.runs, args.seed)
        rows.append((n, median_s, p95_s))
        print(f"n={n}: median={median_s * 1000:.3f} ms p95={p95_s * 1000:.3f} ms")
    exponent = fit_scaling_exponent([r[0] for r in rows], [r[1] for r in rows])
    peak = peak_extraction_memory(6400, args.fs, args.seed)
    print(f"scaling exponent (time vs n log n): {exponent:.3f}")
    print(f"peak extraction memory at n=6400: {peak / 1e6:.2f} MB")
    print(f"machine: {platform.platform()} / {platform.processor() or 'unknown cpu'}")
    csv_text = "n,median_s,p95_s\n" + "".join(
        f"{n},{median_s!r},{p95_s!r}\n" for n, median_s, p95_s in rows
    )
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(csv_text, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# synth


def cmd_synth(args) -> int:
    config = SynthConfig(
        fs=args.fs,
        segment_len=args.segment_len,
        carrier_hz=args.carrier,
        f_ir=args.f_ir,
        f_or=args.f_or,
        depth=args.depth,
        snr_db=args.snr_db,
        burst_decay_s=args.burst_decay,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    labeled = synth_generate(args.per_class, args.seed, config)
    entries = []
    counters = {}
    for signal, label in labeled:
        i = counters.get(label, 0)
        counters[label] = i + 1
        name = f"{label}_{i:03d}.raw"
        write_raw_f64le(signal.samples, out_dir / name)
        entries.append(
            {"path": name, "label": label, "fs": config.fs, "format": "raw-f64le"}
        )
    manifest = out_dir / "manifest.json"
    manifest.write_text(
        json.dumps({"entries": entries}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {len(labeled)} recordings + {manifest}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# plot-data


def cmd_plot_data(args) -> int:
    recording = load_recording(args.input, args.format, args.fs)
    if len(recording) >= args.segment_len:
        segments = segment(recording, args.segment_len)
        if args.segment_index >= len(segments):
            raise ConfigError(
                f"segment index {args.segment_index} out of range "
                f"(recording has {len(segments)} segments)"
            )
        piece = segments[args.segment_index]
    else:
        piece = recording  # short recording: analyze it whole
    series = instantaneous_series(piece)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    exports = {
        "instantaneous.csv": instantaneous_csv(series),
        "iafm.csv": iafm_csv(compute_iafm(series)),
        "iafc.csv": iafc_csv(compute_iafc(series)),
        "heatmap.csv": heatmap_csv(series),
        "iefd.csv": iefd_csv(compute_iefd(series), series.fs),
    }
    for name, text in exports.items():
        (out_dir / name).write_text(text, encoding="utf-8")
        print(f"wrote {out_dir / name}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="envib",
        description="Envelope-based vibration analysis and bearing condition classification.",
    )
    parser.add_argument("--version", action="version", version=f"envib {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract feature rows from a recording manifest")
    p.add_argument("--manifest", required=True, help="JSON manifest of recordings")
    p.add_argument("--out", required=True, help="output feature CSV path")
    p.add_argument("--method", choices=METHODS, default="proposed")
    p.add_argument("--segment-len", type=int, default=6400)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--diagnostics", default=None, help="diagnostics path (default <out>.diag.txt)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train-eval", help="train a forest on a feature CSV and evaluate it")
    p.add_argument("--features", required=True, help="feature CSV from extract")
    p.add_argument("--out-report", required=True, help="evaluation report path")
    p.add_argument("--out-model", default=None, help="model JSON path")
    p.add_argument("--out-predictions", default=None, help="test-set predictions CSV path")
    p.add_argument("--out-confusion", default=None, help="confusion matrix CSV path")
    p.add_argument("--split", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=0, help="0 means unlimited")
    p.add_argument("--min-leaf", type=int, default=1)
    p.add_argument("--features-per-split", type=int, default=3)
    p.set_defaults(func=cmd_train_eval)

    p = sub.add_parser("bench", help="measure extraction latency, scaling, and memory")
    p.add_argument("--out", default=None, help="timing CSV path (default: print)")
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--sizes", type=int, nargs="*", default=None)
    p.add_argument("--fs", type=float, default=64000.0)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="generate the synthetic 4-class benchmark corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--per-class", type=int, default=200)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--fs", type=float, default=64000.0)
    p.add_argument("--segment-len", type=int, default=6400)
    p.add_argument("--carrier", type=float, default=8000.0)
    p.add_argument("--f-ir", type=float, default=123.0)
    p.add_argument("--f-or", type=float, default=76.0)
    p.add_argument("--depth", type=float, default=0.5)
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--burst-decay", type=float, default=0.002)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plot-data", help="export representation CSVs for one segment")
    p.add_argument("--input", required=True, help="recording file")
    p.add_argument("--format", choices=FORMATS, default="raw-f64le")
    p.add_argument("--fs", type=float, default=64000.0)
    p.add_argument("--segment-len", type=int, default=6400)
    p.add_argument("--segment-index", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_plot_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, InvalidLengthError) as exc:
        print(f"error (configuration): {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IngestionError, InvalidSignalError) as exc:
        print(f"error (ingestion): {exc}", file=sys.stderr)
        return EXIT_INGESTION
    except (DegenerateInputError, EmptyDatasetError, StratificationError) as exc:
        print(f"error (degenerate input): {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except EnvibError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
