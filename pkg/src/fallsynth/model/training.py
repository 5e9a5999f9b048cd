"""Training loop: duration-bucketed batches, Adam, per-epoch loss history."""
from __future__ import annotations

import time

import numpy as np

from ..dataset.sequence import MotionSequence, PHASES
from ..kinematics.fk import WitnessCloud
from .cvae import AttributeCvae
from .losses import compute_loss
from .optim import Adam

LOSS_TERMS = ("total", "param", "kl", "vertex", "init")


def _buckets(sequences: list[MotionSequence]) -> dict[tuple, list[int]]:
    """Transformer batches need equal frame counts per phase, so group by the
    duration triple."""
    out: dict[tuple, list[int]] = {}
    for i, seq in enumerate(sequences):
        out.setdefault(seq.durations, []).append(i)
    return out


def train(model: AttributeCvae, sequences: list[MotionSequence], epochs: int,
          batch_size: int = 4, lr: float = 1e-4, rng_seed: int = 0,
          on_epoch=None) -> list[dict]:
    """Optimize the model in place; returns one record per epoch with the
    batch-averaged loss terms and wall time."""
    if not sequences:
        raise ValueError("no sequences to train on")
    cloud = WitnessCloud.default(model.skeleton)
    optimizer = Adam(model.parameters(), lr=lr)
    rng = np.random.default_rng(rng_seed)
    buckets = _buckets(sequences)
    history = []
    for epoch in range(1, epochs + 1):
        started = time.perf_counter()
        sums = dict.fromkeys(LOSS_TERMS, 0.0)
        batches = 0
        for key in sorted(buckets):
            order = rng.permutation(buckets[key])
            for lo in range(0, len(order), batch_size):
                batch = [sequences[i] for i in order[lo:lo + batch_size]]
                recons, dists = model.forward_train(batch, rng)
                targets = {phase: np.stack([seq.phase_frames(phase) for seq in batch])
                           for phase in PHASES}
                losses = compute_loss(recons, dists, targets, model.skeleton, cloud, model.config)
                optimizer.zero_grad()
                losses["total"].backward()
                optimizer.step()
                for term in LOSS_TERMS:
                    sums[term] += losses[term].item()
                batches += 1
        record = {term: sums[term] / batches for term in LOSS_TERMS}
        record["epoch"] = epoch
        record["seconds"] = time.perf_counter() - started
        history.append(record)
        if on_epoch is not None:
            on_epoch(record)
    return history
