"""CLI subcommands: behavior, formats, exit codes, and idempotence."""

import json

import numpy as np
import pytest

from envib import Signal, write_raw_f64le
from envib.cli import EXIT_CONFIG, EXIT_DEGENERATE, EXIT_INGESTION, main

from conftest import tone


def _synth(tmp_path, per_class=3, seed=42, extra=()):
    out = tmp_path / "corpus"
    code = main(
        ["synth", "--out-dir", str(out), "--per-class", str(per_class), "--seed", str(seed)]
        + list(extra)
    )
    assert code == 0
    return out


def test_synth_writes_corpus_and_manifest(tmp_path):
    out = _synth(tmp_path, per_class=2)
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["entries"]) == 8
    raw_files = sorted(p.name for p in out.glob("*.raw"))
    assert len(raw_files) == 8
    assert "healthy_000.raw" in raw_files
    assert (out / "healthy_000.raw").stat().st_size == 6400 * 8


def test_synth_reruns_are_bit_identical(tmp_path):
    a = _synth(tmp_path / "a", per_class=2)
    b = _synth(tmp_path / "b", per_class=2)
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
    for name in ("healthy_000.raw", "outer_race_001.raw"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_synth_rejects_zero_per_class(tmp_path):
    code = main(["synth", "--out-dir", str(tmp_path / "x"), "--per-class", "0"])
    assert code == EXIT_CONFIG


def test_extract_row_counts(tmp_path, rng):
    data_dir = tmp_path / "rec"
    data_dir.mkdir()
    entries = []
    for i in range(10):
        name = f"rec{i}.raw"
        write_raw_f64le(rng.standard_normal(64000), data_dir / name)
        entries.append({"path": name, "label": f"c{i % 2}", "fs": 64000, "format": "raw-f64le"})
    manifest = data_dir / "m.json"
    manifest.write_text(json.dumps({"entries": entries}))
    out = tmp_path / "f.csv"
    assert main(["extract", "--manifest", str(manifest), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 101  # header + 10 recordings x 10 segments
    assert lines[0] == "source,segment,label,ss,sc,cov,cp,pl,mer,method"
    assert lines[1].endswith(",proposed")
    assert (tmp_path / "f.csv.diag.txt").exists()

    out2 = tmp_path / "f2.csv"
    assert main(["extract", "--manifest", str(manifest), "--out", str(out2), "--method", "stft"]) == 0
    lines2 = out2.read_text().splitlines()
    assert len(lines2) == 101
    assert lines2[1].endswith(",stft")


def test_extract_missing_manifest_leaves_no_output(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code = main(["extract", "--manifest", str(tmp_path / "none.json"), "--out", str(out)])
    assert code == EXIT_INGESTION
    assert not out.exists()
    assert "ingestion" in capsys.readouterr().err


def test_extract_degenerate_corpus_exit_code(tmp_path):
    dead = tmp_path / "dead.raw"
    write_raw_f64le(np.zeros(6400), dead)
    manifest = tmp_path / "m.json"
    manifest.write_text(
        json.dumps({"entries": [{"path": "dead.raw", "label": "x", "fs": 64000, "format": "raw-f64le"}]})
    )
    out = tmp_path / "f.csv"
    code = main(["extract", "--manifest", str(manifest), "--out", str(out)])
    assert code == EXIT_DEGENERATE
    assert not out.exists()


def _extract(tmp_path, corpus, name="f.csv"):
    out = tmp_path / name
    assert main(["extract", "--manifest", str(corpus / "manifest.json"), "--out", str(out)]) == 0
    return out


def test_train_eval_writes_all_outputs(tmp_path):
    corpus = _synth(tmp_path, per_class=6)
    features = _extract(tmp_path, corpus)
    report = tmp_path / "report.txt"
    model = tmp_path / "model.json"
    preds = tmp_path / "preds.csv"
    confusion = tmp_path / "confusion.csv"
    code = main(
        [
            "train-eval",
            "--features", str(features),
            "--out-report", str(report),
            "--out-model", str(model),
            "--out-predictions", str(preds),
            "--out-confusion", str(confusion),
        ]
    )
    assert code == 0
    text = report.read_text()
    assert "accuracy:" in text and "seed=42" in text
    assert json.loads(model.read_text())["format_version"] == 1
    pred_lines = preds.read_text().splitlines()
    assert pred_lines[0].startswith("source,segment,label,predicted,p_")
    assert len(pred_lines) == 1 + 8  # 24 rows -> floor(0.7*6)=4 train, 2 test per class
    assert confusion.read_text().splitlines()[0].startswith("true\\predicted,")


def test_train_eval_rerun_is_byte_identical(tmp_path):
    corpus = _synth(tmp_path, per_class=5)
    features = _extract(tmp_path, corpus)
    outputs = []
    for tag in ("one", "two"):
        report = tmp_path / f"report-{tag}.txt"
        preds = tmp_path / f"preds-{tag}.csv"
        assert main(
            [
                "train-eval",
                "--features", str(features),
                "--out-report", str(report),
                "--out-predictions", str(preds),
                "--seed", "42",
            ]
        ) == 0
        outputs.append((report.read_bytes(), preds.read_bytes()))
    assert outputs[0] == outputs[1]


def test_train_eval_extreme_split_keeps_stratification(tmp_path):
    corpus = _synth(tmp_path, per_class=4)
    features = _extract(tmp_path, corpus)
    report = tmp_path / "report.txt"
    code = main(
        ["train-eval", "--features", str(features), "--out-report", str(report), "--split", "0.999"]
    )
    assert code == 0
    assert "test rows: 4" in report.read_text()


def test_train_eval_bad_split_is_config_error(tmp_path):
    corpus = _synth(tmp_path, per_class=3)
    features = _extract(tmp_path, corpus)
    code = main(
        ["train-eval", "--features", str(features), "--out-report", str(tmp_path / "r.txt"), "--split", "1.5"]
    )
    assert code == EXIT_CONFIG


def test_bench_writes_csv(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(["bench", "--sizes", "1600", "3200", "--runs", "3", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,median_s,p95_s"
    assert len(lines) == 3
    assert [float(v) for v in lines[1].split(",")][0] == 1600
    stdout = capsys.readouterr().out
    assert "scaling exponent" in stdout and "machine:" in stdout


def test_plot_data_exports_all_representations(tmp_path):
    raw = tmp_path / "tone.raw"
    write_raw_f64le(tone(n=6400).samples, raw)
    out = tmp_path / "plots"
    assert main(["plot-data", "--input", str(raw), "--out-dir", str(out)]) == 0
    n = 6400
    iafc_lines = (out / "iafc.csv").read_text().splitlines()
    assert len(iafc_lines) == 2 * n - 1 + 1
    heatmap_lines = (out / "heatmap.csv").read_text().splitlines()
    assert len(heatmap_lines) == n + 1
    assert (out / "iafm.csv").read_text().splitlines()[0] == "freq_hz,amp"
    assert (out / "instantaneous.csv").read_text().splitlines()[0] == "time_s,ia,if_hz"
    assert (out / "iefd.csv").read_text().splitlines()[0] == "time_s,value"


def test_plot_data_segment_index_out_of_range(tmp_path):
    raw = tmp_path / "tone.raw"
    write_raw_f64le(tone(n=6400).samples, raw)
    code = main(
        ["plot-data", "--input", str(raw), "--out-dir", str(tmp_path / "p"), "--segment-index", "3"]
    )
    assert code == EXIT_CONFIG


def test_seed_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("ENVIB_SEED", "7")
    corpus = _synth(tmp_path, per_class=3, seed=7)
    features = _extract(tmp_path, corpus)
    report = tmp_path / "report.txt"
    assert main(["train-eval", "--features", str(features), "--out-report", str(report)]) == 0
    assert "seed=7" in report.read_text()


def test_workers_env_override_matches_serial(tmp_path, monkeypatch):
    corpus = _synth(tmp_path, per_class=3)
    serial = _extract(tmp_path, corpus, "serial.csv")
    monkeypatch.setenv("ENVIB_WORKERS", "3")
    threaded = _extract(tmp_path, corpus, "threaded.csv")
    assert serial.read_bytes() == threaded.read_bytes()
