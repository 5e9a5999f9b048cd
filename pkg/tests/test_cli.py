"""Command-line interface: files written, exit codes, reproducibility."""

import json
from pathlib import Path

import numpy as np
import pytest

from fallsynth.cli import main
from fallsynth.dataset.io import load_dataset, load_sequence
from fallsynth.reporting import LOSS_CSV_COLUMNS, read_loss_csv

TINY_MODEL_TOML = """
[model]
latent_dim = 8
num_layers = 1
num_heads = 2
ff_dim = 16
"""


def run(*argv) -> int:
    return main([str(a) for a in argv])


def tree_bytes(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """One tiny end-to-end pipeline shared by the read-only assertions."""
    root = tmp_path_factory.mktemp("cli")
    (root / "tiny.toml").write_text(TINY_MODEL_TOML)
    assert run("synth", "--count", 40, "--seed", 3, "--durations", "4,4,4",
               "--out", root / "data") == 0
    assert run("train", "--data", root / "data", "--config", root / "tiny.toml",
               "--epochs", 2, "--batch-size", 4, "--seed", 0,
               "--out", root / "ckpt.fsck", "--report-dir", root / "report") == 0
    return root


def test_synth_writes_a_loadable_dataset(workdir):
    data = load_dataset(workdir / "data")
    assert len(data) == 40
    assert all(seq.frames.shape == (12, 153) for seq in data)
    assert (workdir / "data" / "manifest.json").exists()


def test_synth_is_bit_reproducible(tmp_path):
    for name in ("a", "b"):
        assert run("synth", "--count", 6, "--seed", 9, "--durations", "4,4,4",
                   "--out", tmp_path / name) == 0
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


def test_synth_split_spec(tmp_path):
    assert run("synth", "--count", 10, "--seed", 1, "--durations", "4,4,4",
               "--split", "train=0.8,val=0.2", "--out", tmp_path / "d") == 0
    manifest = json.loads((tmp_path / "d" / "manifest.json").read_text())
    assert set(manifest["splits"]) == {"train", "val"}
    assert len(load_dataset(tmp_path / "d", split="val")) == 2


def test_train_writes_checkpoint_and_loss_report(workdir):
    from fallsynth.model.checkpoint import load_model

    model, step, _ = load_model(workdir / "ckpt.fsck")
    assert step > 0
    assert model.config.latent_dim == 8
    assert (workdir / "report" / "loss.png").stat().st_size > 0
    rows = read_loss_csv(workdir / "report" / "loss.csv")
    assert len(rows) == 2
    assert list(rows[0]) == list(LOSS_CSV_COLUMNS)
    assert rows[0]["step"] == 1.0
    assert rows[1]["total"] < rows[0]["total"]


def test_generate_single_roundtrip(workdir, tmp_path):
    out = tmp_path / "sample.json"
    figure = tmp_path / "sample.png"
    assert run("generate", "--checkpoint", workdir / "ckpt.fsck",
               "--impact-location", "head", "--impact-quality", "shot",
               "--glitch-quality", "spin", "--fall-quality", "hinge",
               "--durations", "4,4,4", "--seed", 5, "--out", out,
               "--figure", figure) == 0
    seq = load_sequence(out)
    assert seq.frames.shape == (12, 153)
    assert seq.attributes.glitch_quality == "spin"
    assert figure.stat().st_size > 0


def test_generate_batch_and_determinism(workdir, tmp_path):
    for name in ("g1", "g2"):
        assert run("generate", "--checkpoint", workdir / "ckpt.fsck",
                   "--count", 8, "--durations", "4,4,4", "--seed", 11,
                   "--out", tmp_path / name) == 0
    assert tree_bytes(tmp_path / "g1") == tree_bytes(tmp_path / "g2")
    batch = load_dataset(tmp_path / "g1")
    assert len(batch) == 8
    # batch mode walks the attribute grid
    assert len({seq.attributes.impact_class() for seq in batch}) > 1


def test_eval_report_schema(workdir, tmp_path):
    assert run("train-recognizer", "--data", workdir / "data", "--epochs", 2,
               "--seed", 0, "--out", tmp_path / "rec.fsck",
               "--report-dir", tmp_path / "rec_report") == 0
    assert run("generate", "--checkpoint", workdir / "ckpt.fsck", "--count", 6,
               "--durations", "4,4,4", "--seed", 2, "--out", tmp_path / "gen") == 0
    out = tmp_path / "metrics.json"
    assert run("eval", "--real", workdir / "data", "--gen", tmp_path / "gen",
               "--recognizer", tmp_path / "rec.fsck", "--pairs", 20,
               "--out", out) == 0
    report = json.loads(out.read_text())
    assert set(report) == {"fid", "accuracy", "diversity", "n_real", "n_gen", "config_hash"}
    assert report["n_real"] == 40 and report["n_gen"] == 6
    assert (tmp_path / "metrics.png").stat().st_size > 0


def test_ablate_compares_both_modes(workdir, tmp_path):
    out_dir = tmp_path / "ablation"
    assert run("ablate", "--data", workdir / "data", "--config", workdir / "tiny.toml",
               "--epochs", 2, "--seed", 0, "--out-dir", out_dir) == 0
    comparison = json.loads((out_dir / "comparison.json").read_text())
    assert set(comparison["modes"]) == {"addition", "concatenation"}
    for entry in comparison["modes"].values():
        assert entry["final_loss"] <= entry["initial_loss"]
        assert len(entry["history"]) == 2
    assert (out_dir / "comparison.png").stat().st_size > 0
    assert (out_dir / "ckpt_addition.fsck").exists()
    assert (out_dir / "ckpt_concatenation.fsck").exists()


def test_inspect_prints_stats(workdir, tmp_path, capsys):
    sample = tmp_path / "one.json"
    assert run("generate", "--checkpoint", workdir / "ckpt.fsck",
               "--impact-location", "torso", "--impact-quality", "push",
               "--glitch-quality", "shake", "--fall-quality", "release",
               "--durations", "4,4,4", "--seed", 1, "--out", sample) == 0
    capsys.readouterr()
    assert run("inspect", str(sample)) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["frames"] == 12
    assert stats["boundaries"] == {"impact_end": 4, "glitch_end": 8}
    assert stats["attributes"]["glitch_quality"] == "shake"


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["synth"])  # missing --out
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main(["generate", "--checkpoint", "x.fsck", "--out", "y.json",
              "--glitch-quality", "wobble"])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main(["no-such-command"])
    assert excinfo.value.code == 2


def test_runtime_errors_exit_1(tmp_path, capsys):
    assert run("train", "--data", tmp_path / "missing", "--out", tmp_path / "x.fsck") == 1
    assert "error:" in capsys.readouterr().err
    assert run("generate", "--checkpoint", tmp_path / "missing.fsck",
               "--out", tmp_path / "y.json") == 1
    assert "error:" in capsys.readouterr().err


def test_machine_output_stays_off_stderr(workdir, tmp_path, capsys):
    """stderr carries progress only; artifacts land in files."""
    out = tmp_path / "s.json"
    assert run("generate", "--checkpoint", workdir / "ckpt.fsck",
               "--impact-location", "legs", "--impact-quality", "prick",
               "--glitch-quality", "flail", "--fall-quality", "suspend",
               "--durations", "4,4,4", "--out", out) == 0
    captured = capsys.readouterr()
    assert captured.out == ""
    json.loads(out.read_text())
