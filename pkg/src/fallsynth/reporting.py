"""Figures and delimited reports for training, evaluation and ablation runs."""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .metrics.recognizer import HEAD_CLASSES, HEADS
from .model.training import LOSS_TERMS

LOSS_CSV_COLUMNS = ("step", "total", "l_param", "l_kl", "l_vertex", "l_init")
PHASE_COLORS = {"impact": "#d62728", "glitch": "#9467bd", "fall": "#1f77b4"}


def write_loss_csv(path, history: list[dict]) -> Path:
    """One row per training step with every loss term."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOSS_CSV_COLUMNS)
        for record in history:
            writer.writerow([record["epoch"], record["total"], record["param"],
                             record["kl"], record["vertex"], record["init"]])
    return path


def read_loss_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()}
                for row in csv.DictReader(fh)]


def plot_loss_curves(path, history: list[dict], title: str = "training loss") -> Path:
    path = Path(path)
    steps = [r["epoch"] for r in history]
    fig, (ax_total, ax_terms) = plt.subplots(1, 2, figsize=(11, 4))
    ax_total.plot(steps, [r["total"] for r in history], color="black")
    ax_total.set_xlabel("epoch")
    ax_total.set_ylabel("total loss")
    ax_total.set_title(title)
    for term in LOSS_TERMS[1:]:
        ax_terms.plot(steps, [r[term] for r in history], label=term)
    ax_terms.set_xlabel("epoch")
    ax_terms.set_yscale("log")
    ax_terms.set_title("loss terms")
    ax_terms.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_evaluation(path, report: dict) -> Path:
    """Accuracy per head against chance, plus the scalar metrics."""
    path = Path(path)
    fig, (ax_acc, ax_scalar) = plt.subplots(1, 2, figsize=(11, 4))

    accuracy = report["accuracy"]
    names = list(HEADS) + ["mean"]
    values = [accuracy[h] for h in HEADS] + [accuracy["mean"]]
    bars = ax_acc.bar(names, values, color=["#d62728", "#9467bd", "#1f77b4", "#7f7f7f"])
    chance = [1.0 / HEAD_CLASSES[h] for h in HEADS]
    chance.append(float(np.mean(chance)))
    for x, c in enumerate(chance):
        ax_acc.hlines(c, x - 0.4, x + 0.4, color="black", linestyle="--", linewidth=1)
    ax_acc.bar_label(bars, fmt="%.2f")
    ax_acc.set_ylim(0, 1.05)
    ax_acc.set_ylabel("recognition accuracy")
    ax_acc.set_title("accuracy vs chance (dashed)")

    scalars = {"fid": report["fid"], "diversity": report["diversity"]}
    bars = ax_scalar.bar(list(scalars), list(scalars.values()), color=["#2ca02c", "#ff7f0e"])
    ax_scalar.bar_label(bars, fmt="%.3f")
    ax_scalar.set_title(f"n_real={report['n_real']}, n_gen={report['n_gen']}")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_ablation(path, comparison: dict) -> Path:
    """Loss curves for every decoder-conditioning mode side by side, and the
    evaluation scalars when the report carries them."""
    path = Path(path)
    modes = comparison["modes"]
    has_metrics = any(entry.get("metrics") for entry in modes.values())
    fig, axes = plt.subplots(1, 2 if has_metrics else 1,
                             figsize=(11 if has_metrics else 6, 4), squeeze=False)
    ax_loss = axes[0][0]
    for mode, entry in modes.items():
        steps = [r["epoch"] for r in entry["history"]]
        ax_loss.plot(steps, [r["total"] for r in entry["history"]], label=mode)
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("total loss")
    ax_loss.set_title("decoder conditioning ablation")
    ax_loss.legend()

    if has_metrics:
        ax_m = axes[0][1]
        names = ["fid", "diversity", "accuracy"]
        width = 0.8 / len(modes)
        for i, (mode, entry) in enumerate(modes.items()):
            m = entry["metrics"]
            values = [m["fid"], m["diversity"], m["accuracy"]["mean"]]
            xs = np.arange(len(names)) + i * width
            bars = ax_m.bar(xs, values, width=width, label=mode)
            ax_m.bar_label(bars, fmt="%.2f")
        ax_m.set_xticks(np.arange(len(names)) + 0.4 - width / 2)
        ax_m.set_xticklabels(names)
        ax_m.set_title("evaluation metrics")
        ax_m.legend()

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_sequence_summary(path, sequence, skeleton) -> Path:
    """Root trajectory and joint heights with phase boundaries marked."""
    from .kinematics.fk import forward_kinematics

    path = Path(path)
    positions = forward_kinematics(skeleton, sequence.frames)  # (K, J, 3)
    t = np.arange(sequence.num_frames) / sequence.fps
    fig, (ax_h, ax_xy) = plt.subplots(1, 2, figsize=(11, 4))

    ax_h.plot(t, positions[:, 0, 1], color="black", label="root height")
    ax_h.plot(t, positions[:, :, 1].min(axis=1), color="gray",
              linestyle=":", label="lowest joint")
    for name, end in (("impact", sequence.impact_end), ("glitch", sequence.glitch_end)):
        ax_h.axvline(end / sequence.fps, color=PHASE_COLORS[name], linestyle="--")
    ax_h.set_xlabel("seconds")
    ax_h.set_ylabel("height (m)")
    ax_h.legend()
    ax_h.set_title(" / ".join(sequence.attributes.as_dict().values()))

    ax_xy.plot(positions[:, 0, 0], positions[:, 0, 2], color="black")
    ax_xy.scatter([positions[0, 0, 0]], [positions[0, 0, 2]], color="green", label="start")
    ax_xy.scatter([positions[-1, 0, 0]], [positions[-1, 0, 2]], color="red", label="end")
    ax_xy.set_xlabel("x (m)")
    ax_xy.set_ylabel("z (m)")
    ax_xy.set_aspect("equal")
    ax_xy.legend()
    ax_xy.set_title("root path, top view")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
