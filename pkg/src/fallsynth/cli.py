"""Command line pipeline driver.

Machine-readable output always goes to files; progress and summaries go to
stderr.  Usage errors exit 2 (argparse), runtime failures exit 1.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from .dataset.attributes import AttributeConfig, VOCABULARIES
from .dataset.augment import augment_fft, augment_yaw
from .dataset.io import load_dataset, load_sequence, save_sequence, split_names, write_manifest
from .dataset.synthetic import DEFAULT_DURATIONS, synthesize_dataset
from .engine import GenerationEngine
from .kinematics.fk import forward_kinematics
from .kinematics.skeleton import load_skeleton
from .metrics.evaluation import evaluation_report
from .metrics.recognizer import (RecognizerConfig, load_recognizer, save_recognizer,
                                 train_recognizer)
from .model.checkpoint import save_model
from .model.config import ModelConfig
from .model.cvae import AttributeCvae
from .model.training import train


def _log(message: str):
    print(message, file=sys.stderr, flush=True)


def _profile(args) -> dict:
    path = getattr(args, "config", None)
    if not path:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _pick(flag, section: dict, key: str, default):
    """Flag beats config file beats built-in default."""
    if flag is not None:
        return flag
    return section.get(key, default)


def _model_config(section: dict) -> ModelConfig:
    fields = {f.name for f in dataclasses.fields(ModelConfig)}
    unknown = sorted(set(section) - fields)
    if unknown:
        raise ValueError(f"unknown [model] keys {unknown}; known: {sorted(fields)}")
    return ModelConfig(**section)


def _durations(text: str | None, section: dict | None = None) -> tuple[int, int, int]:
    if text is None and section and "durations" in section:
        parts = section["durations"]
    elif text is None:
        return DEFAULT_DURATIONS
    else:
        parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"durations must be three comma-separated frame counts, got {text!r}")
    return tuple(int(p) for p in parts)


def _write_dataset(out: Path, sequences, seed: int, split_spec: str | None):
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for i, seq in enumerate(sequences):
        name = f"trial_{i:04d}.json"
        save_sequence(seq, out / name)
        names.append(name)
    if split_spec:
        fractions = {}
        for part in split_spec.split(","):
            key, _, value = part.partition("=")
            fractions[key.strip()] = float(value)
        splits = split_names(names, fractions, seed)
    else:
        splits = {"train": names}
    write_manifest(out, splits, seed)
    return splits


def cmd_synth(args) -> int:
    section = _profile(args).get("dataset", {})
    durations = _durations(args.durations, section)
    count = _pick(args.count, section, "count", 50)
    preset = _pick(args.preset, section, "preset", "male")
    fps = _pick(args.fps, section, "fps", 24.0)
    started = time.perf_counter()
    sequences = synthesize_dataset(count, master_seed=args.seed, durations=durations,
                                   fps=fps, preset=preset, balanced=not args.unbalanced)
    splits = _write_dataset(Path(args.out), sequences, args.seed, args.split)
    sizes = {k: len(v) for k, v in splits.items()}
    _log(f"synth: wrote {count} trials to {args.out} in {time.perf_counter() - started:.1f}s, splits {sizes}")
    return 0


def cmd_augment(args) -> int:
    section = _profile(args).get("augment", {})
    magnitude = _pick(args.magnitude_jitter, section, "magnitude_jitter", 0.1)
    phase = _pick(args.phase_jitter, section, "phase_jitter", 0.2)
    preserve = _pick(args.preserve_low_bins, section, "preserve_low_bins", 2)
    sequences = load_dataset(args.data, split=args.split)
    out = []
    if not args.no_originals:
        out.extend(sequences)
    for c in range(args.copies):
        for i, seq in enumerate(sequences):
            seed = int(np.random.SeedSequence((args.seed, c, i)).generate_state(1)[0])
            augmented = augment_fft(seq, magnitude, phase,
                                    preserve_low_bins=preserve, rng_seed=seed)
            if args.yaw:
                augmented = augment_yaw(augmented, rng_seed=seed + 1)
            out.append(augmented)
    _write_dataset(Path(args.out), out, args.seed, None)
    _log(f"augment: {len(sequences)} trials -> {len(out)} ({args.copies} copies"
         f"{', originals kept' if not args.no_originals else ''}) in {args.out}")
    return 0


def cmd_train(args) -> int:
    from .reporting import plot_loss_curves, write_loss_csv

    profile = _profile(args)
    training = profile.get("training", {})
    config = _model_config(profile.get("model", {}))
    epochs = _pick(args.epochs, training, "epochs", 50)
    batch_size = _pick(args.batch_size, training, "batch_size", 4)
    lr = _pick(args.lr, training, "lr", 1e-3)
    seed = _pick(args.seed, training, "seed", 0)

    sequences = load_dataset(args.data, split=args.split)
    skeleton = load_skeleton(args.preset)
    model = AttributeCvae(config, skeleton=skeleton, rng_seed=seed)
    n_params = sum(p.data.size for p in model.parameters().values())
    _log(f"train: {len(sequences)} trials, {n_params} parameters, {epochs} epochs")

    def on_epoch(record):
        _log(f"  epoch {record['epoch']:4d}  total {record['total']:.4f}  "
             f"param {record['param']:.4f}  kl {record['kl']:.2f}  "
             f"vertex {record['vertex']:.4f}  init {record['init']:.4f}  "
             f"({record['seconds']:.1f}s)")

    history = train(model, sequences, epochs, batch_size=batch_size,
                    lr=lr, rng_seed=seed, on_epoch=on_epoch)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(out, model, step=epochs * max(1, len(sequences) // batch_size))
    report_dir = Path(args.report_dir) if args.report_dir else out.parent
    report_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_loss_csv(report_dir / "loss.csv", history)
    png_path = plot_loss_curves(report_dir / "loss.png", history)
    drop = 1.0 - history[-1]["total"] / history[0]["total"]
    _log(f"train: loss {history[0]['total']:.4f} -> {history[-1]['total']:.4f} "
         f"({drop:.0%} drop); checkpoint {out}, curves {csv_path}, {png_path}")
    return 0


def cmd_train_recognizer(args) -> int:
    from .reporting import plot_loss_curves

    profile = _profile(args)
    section = profile.get("recognizer", {})
    epochs = _pick(args.epochs, section, "epochs", 25)
    lr = _pick(args.lr, section, "lr", 1e-3)
    batch_size = _pick(args.batch_size, section, "batch_size", 8)
    holdout = _pick(args.holdout, section, "holdout", 0.2)

    sequences = load_dataset(args.data, split=args.split)
    skeleton = load_skeleton(args.preset)
    _log(f"train-recognizer: {len(sequences)} trials, {epochs} epochs")

    def on_epoch(record):
        _log(f"  epoch {record['epoch']:4d}  loss {record['loss']:.4f}")

    model, report = train_recognizer(sequences, epochs=epochs, lr=lr,
                                     batch_size=batch_size, rng_seed=args.seed,
                                     holdout=holdout, skeleton=skeleton, on_epoch=on_epoch)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_recognizer(out, model, step=epochs)
    report_dir = Path(args.report_dir) if args.report_dir else out.parent
    report_dir.mkdir(parents=True, exist_ok=True)
    with open(report_dir / "recognizer_report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    from . import reporting  # noqa: F401  (selects the Agg backend)
    import matplotlib.pyplot as plt

    history = report["history"]
    plt.figure(figsize=(6, 4))
    plt.plot([h["epoch"] for h in history], [h["loss"] for h in history], color="black")
    plt.xlabel("epoch")
    plt.ylabel("cross entropy")
    plt.title("recognizer training")
    plt.tight_layout()
    plt.savefig(report_dir / "recognizer_loss.png", dpi=120)
    plt.close()
    acc = report["val_accuracy"]
    _log(f"train-recognizer: val accuracy impact {acc['impact']:.3f} glitch {acc['glitch']:.3f} "
         f"fall {acc['fall']:.3f} mean {acc['mean']:.3f}; checkpoint {out}")
    return 0


def _parse_attrs(args) -> AttributeConfig:
    """Unset attribute flags fall back to each vocabulary's first entry."""
    values = {
        "impact_location": args.impact_location,
        "impact_quality": args.impact_quality,
        "glitch_quality": args.glitch_quality,
        "fall_quality": args.fall_quality,
    }
    for name, vocab in VOCABULARIES.items():
        if values[name] is None:
            values[name] = vocab[0]
    return AttributeConfig.from_dict(values)


def cmd_generate(args) -> int:
    engine = GenerationEngine.from_checkpoint(args.checkpoint)
    durations = list(_durations(args.durations)) if args.durations else None
    out = Path(args.out)
    if args.count == 1 and out.suffix == ".json":
        attrs = _parse_attrs(args)
        sequence, meta = engine.generate(attrs.as_dict(), durations=durations,
                                         seed=args.seed, body_model=args.preset)
        out.parent.mkdir(parents=True, exist_ok=True)
        save_sequence(sequence, out)
        if args.figure:
            from .reporting import plot_sequence_summary
            plot_sequence_summary(args.figure, sequence, load_skeleton(args.preset))
        _log(f"generate: seed {meta['seed']} checkpoint {meta['checkpoint_id']} -> {out}")
        return 0
    # batch mode: one file per sample, grid attributes unless flags fix them
    from .dataset.synthetic import grid_attributes

    fixed = None
    if args.impact_location or args.impact_quality or args.glitch_quality or args.fall_quality:
        fixed = _parse_attrs(args)
    sequences = []
    for i in range(args.count):
        attrs = fixed if fixed is not None else grid_attributes(i)
        seed = int(np.random.SeedSequence((args.seed, i)).generate_state(1)[0]) % (2**31 - 1)
        seq, _ = engine.generate(attrs.as_dict(), durations=durations,
                                 seed=seed, body_model=args.preset)
        sequences.append(seq)
    _write_dataset(out, sequences, args.seed, None)
    _log(f"generate: {args.count} samples -> {out}")
    return 0


def cmd_eval(args) -> int:
    from .reporting import plot_evaluation

    recognizer = load_recognizer(args.recognizer)
    real = load_dataset(args.real, split=args.real_split)
    generated = load_dataset(args.gen)
    report = evaluation_report(recognizer, real, generated,
                               num_pairs=args.pairs, rng_seed=args.seed,
                               config={"real": str(args.real), "gen": str(args.gen),
                                       "recognizer": str(args.recognizer),
                                       "pairs": args.pairs, "seed": args.seed})
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    figure = Path(args.figure) if args.figure else out.with_suffix(".png")
    plot_evaluation(figure, report)
    _log(f"eval: fid {report['fid']:.3f} accuracy {report['accuracy']['mean']:.3f} "
         f"diversity {report['diversity']:.3f} -> {out}, {figure}")
    return 0


def cmd_ablate(args) -> int:
    from .ablation import run_ablation
    from .reporting import plot_ablation

    profile = _profile(args)
    training = profile.get("training", {})
    config = _model_config(profile.get("model", {}))
    epochs = _pick(args.epochs, training, "epochs", 10)
    batch_size = _pick(args.batch_size, training, "batch_size", 4)
    lr = _pick(args.lr, training, "lr", 1e-3)
    seed = _pick(args.seed, training, "seed", 0)

    sequences = load_dataset(args.data, split=args.split)
    recognizer = load_recognizer(args.recognizer) if args.recognizer else None

    def on_epoch(mode, record):
        _log(f"  [{mode}] epoch {record['epoch']:4d}  total {record['total']:.4f}")

    comparison, models = run_ablation(sequences, config, epochs,
                                      batch_size=batch_size, lr=lr, rng_seed=seed,
                                      recognizer=recognizer,
                                      eval_samples=args.eval_samples, on_epoch=on_epoch)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for mode, model in models.items():
        save_model(out_dir / f"ckpt_{mode}.fsck", model, step=epochs)
    with open(out_dir / "comparison.json", "w") as fh:
        json.dump(comparison, fh, indent=2, sort_keys=True)
        fh.write("\n")
    plot_ablation(out_dir / "comparison.png", comparison)
    for mode, entry in comparison["modes"].items():
        _log(f"ablate: {mode}: loss {entry['initial_loss']:.4f} -> {entry['final_loss']:.4f} "
             f"({entry['loss_drop']:.0%} drop)")
    _log(f"ablate: report -> {out_dir}/comparison.json, comparison.png")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app
    from .service.config import load_service_config

    config = load_service_config(args.config)
    if args.host:
        config = dataclasses.replace(config, host=args.host)
    if args.port is not None:
        config = dataclasses.replace(config, port=args.port)
    if args.checkpoint:
        config = dataclasses.replace(config, checkpoint_path=str(args.checkpoint))
    app = create_app(config)
    _log(f"serve: http://{config.host}:{config.port} "
         f"(checkpoint {config.checkpoint_path or 'none'})")
    uvicorn.run(app, host=config.host, port=config.port, log_level=config.log_level)
    return 0


def cmd_inspect(args) -> int:
    seq = load_sequence(args.path)
    skeleton = load_skeleton(args.preset)
    positions = forward_kinematics(skeleton, seq.frames)
    heights = positions[:, :, 1]
    deltas = np.abs(np.diff(seq.frames, axis=0)).max() if seq.num_frames > 1 else 0.0
    stats = {
        "frames": seq.num_frames,
        "fps": seq.fps,
        "duration_seconds": seq.num_frames / seq.fps,
        "boundaries": {"impact_end": seq.impact_end, "glitch_end": seq.glitch_end},
        "attributes": seq.attributes.as_dict(),
        "root_height_start": float(positions[0, 0, 1]),
        "root_height_end": float(positions[-1, 0, 1]),
        "lowest_joint_end": float(heights[-1].min()),
        "max_frame_delta": float(deltas),
    }
    print(json.dumps(stats, indent=2, sort_keys=True))
    if args.figure:
        from .reporting import plot_sequence_summary
        plot_sequence_summary(args.figure, seq, skeleton)
        _log(f"inspect: figure -> {args.figure}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fallsynth",
                                     description="Phase-structured falling-motion synthesis pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--durations", default=None, help="impact,glitch,fall frame counts")
    p.add_argument("--fps", type=float, default=None)
    p.add_argument("--preset", default=None, choices=["male", "female"])
    p.add_argument("--unbalanced", action="store_true",
                   help="draw attributes uniformly instead of walking the grid")
    p.add_argument("--split", default=None, help="e.g. train=0.8,val=0.2")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("augment", help="expand a dataset with frequency-domain jitter")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--split", default=None)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--magnitude-jitter", type=float, default=None)
    p.add_argument("--phase-jitter", type=float, default=None)
    p.add_argument("--preserve-low-bins", type=int, default=None)
    p.add_argument("--yaw", action="store_true", help="also rotate each copy about vertical")
    p.add_argument("--no-originals", action="store_true")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train", help="fit the generator; writes checkpoint + loss curves")
    p.add_argument("--data", required=True)
    p.add_argument("--split", default=None)
    p.add_argument("--config", default=None, help="TOML profile; flags override")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--preset", default="male", choices=["male", "female"])
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--report-dir", default=None, help="loss.csv/loss.png directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("train-recognizer", help="fit the evaluation classifier")
    p.add_argument("--data", required=True)
    p.add_argument("--split", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--holdout", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset", default="male", choices=["male", "female"])
    p.add_argument("--out", required=True)
    p.add_argument("--report-dir", default=None)
    p.set_defaults(func=cmd_train_recognizer)

    p = sub.add_parser("generate", help="sample sequences from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--impact-location", default=None, choices=list(VOCABULARIES["impact_location"]))
    p.add_argument("--impact-quality", default=None, choices=list(VOCABULARIES["impact_quality"]))
    p.add_argument("--glitch-quality", default=None, choices=list(VOCABULARIES["glitch_quality"]))
    p.add_argument("--fall-quality", default=None, choices=list(VOCABULARIES["fall_quality"]))
    p.add_argument("--durations", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--preset", default="male", choices=["male", "female"])
    p.add_argument("--out", required=True, help=".json for one sample, directory for --count > 1")
    p.add_argument("--figure", default=None, help="optional trajectory figure (single sample)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="score generations against a real set")
    p.add_argument("--real", required=True)
    p.add_argument("--real-split", default=None)
    p.add_argument("--gen", required=True)
    p.add_argument("--recognizer", required=True)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="metrics JSON path")
    p.add_argument("--figure", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="train both decoder-conditioning modes and compare")
    p.add_argument("--data", required=True)
    p.add_argument("--split", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--recognizer", default=None)
    p.add_argument("--eval-samples", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("serve", help="run the HTTP generation service")
    p.add_argument("--config", default=None, help="TOML with a [service] table")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--checkpoint", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("inspect", help="print sequence statistics")
    p.add_argument("path")
    p.add_argument("--preset", default="male", choices=["male", "female"])
    p.add_argument("--figure", default=None)
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        _log("interrupted")
        return 1
    except Exception as exc:
        _log(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
