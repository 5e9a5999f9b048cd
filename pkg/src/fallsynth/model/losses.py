"""The four-part training loss.

total = w_param * L_param + w_kl * L_kl + w_vertex * L_vertex + w_init * L_init

L_param is the mean squared error over every pose scalar; L_kl the closed
form divergence of each phase posterior from N(0, I), summed over phases and
averaged over the batch; L_vertex the mean squared error of world-space
witness points (differentiable FK on reconstructions, reference FK on the
ground truth); L_init repeats the param and vertex terms restricted to the
first frame of each phase.
"""
from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import ShapeMismatch, Tensor
from ..dataset.sequence import PHASES
from ..kinematics.fk import WitnessCloud, witness_points
from ..kinematics.pose import POSE_DIM
from ..kinematics.skeleton import Skeleton
from .config import ModelConfig
from .cvae import LatentDistribution
from .diffkin import witness_points_t


def kl_divergence(dists: dict[str, LatentDistribution]) -> Tensor:
    """Sum over phases of -1/2 * sum_dims(1 + logvar - mu^2 - exp(logvar)),
    averaged over the batch.  Zero exactly at mu=0, logvar=0."""
    total = None
    for phase in PHASES:
        dist = dists[phase]
        inner = ad.sub(ad.add(1.0, dist.logvar),
                       ad.add(ad.mul(dist.mu, dist.mu), ad.exp(dist.logvar)))
        per_item = ad.mul(ad.reduce_sum(inner, axis=-1), -0.5)
        term = per_item.mean() if per_item.ndim > 0 else per_item
        total = term if total is None else ad.add(total, term)
    return total


def _mse(a: Tensor, b: np.ndarray) -> Tensor:
    if tuple(a.shape) != tuple(np.shape(b)):
        raise ShapeMismatch(f"loss operands {tuple(a.shape)} vs {tuple(np.shape(b))}")
    diff = ad.sub(a, Tensor(b))
    return ad.reduce_mean(ad.mul(diff, diff))


def _stack_phases(recons: dict[str, Tensor], frame_index=None) -> Tensor:
    """Concatenate phase outputs along time as a (B*T_total, 153) tensor,
    or just the per-phase frame ``frame_index`` when given."""
    pieces = []
    for phase in PHASES:
        r = recons[phase]
        if frame_index is not None:
            r = ad.take(r, (slice(None), slice(frame_index, frame_index + 1)))
        pieces.append(ad.reshape(r, (-1, POSE_DIM)))
    return ad.concat(pieces, axis=0)


def compute_loss(recons: dict[str, Tensor], dists: dict[str, LatentDistribution],
                 targets: dict[str, np.ndarray], skeleton: Skeleton, cloud: WitnessCloud,
                 config: ModelConfig) -> dict[str, Tensor]:
    """All loss terms plus their weighted total, as scalar tensors."""
    for phase in PHASES:
        if tuple(recons[phase].shape) != targets[phase].shape:
            raise ShapeMismatch(
                f"{phase} reconstruction {tuple(recons[phase].shape)} vs target {targets[phase].shape}")

    flat_targets = np.concatenate([targets[p].reshape(-1, POSE_DIM) for p in PHASES], axis=0)
    flat_recon = _stack_phases(recons)
    l_param = _mse(flat_recon, flat_targets)

    target_witness = witness_points(skeleton, cloud, flat_targets)
    l_vertex = _mse(witness_points_t(skeleton, cloud, flat_recon), target_witness)

    first_targets = np.concatenate([targets[p][:, 0] for p in PHASES], axis=0)
    first_recon = _stack_phases(recons, frame_index=0)
    l_init_param = _mse(first_recon, first_targets)
    l_init_vertex = _mse(witness_points_t(skeleton, cloud, first_recon),
                         witness_points(skeleton, cloud, first_targets))
    l_init = ad.add(l_init_param, l_init_vertex)

    l_kl = kl_divergence(dists)
    total = ad.add(ad.add(ad.mul(l_param, config.w_param), ad.mul(l_kl, config.w_kl)),
                   ad.add(ad.mul(l_vertex, config.w_vertex), ad.mul(l_init, config.w_init)))
    return {"param": l_param, "kl": l_kl, "vertex": l_vertex, "init": l_init, "total": total}
