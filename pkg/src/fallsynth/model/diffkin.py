"""Differentiable mirrors of the rotation recovery, forward kinematics, and
witness-point map, built from autodiff primitives.

The numpy implementations in ``kinematics`` stay the reference; these
functions must agree with them on valid inputs (checked in tests) while
letting gradients flow from world-space point errors back to pose vectors.
Degenerate 6D inputs are not guarded here: raising mid-batch is useless
during training, and near-zero first columns do not arise from the data or
from finite optimization steps at the tested scales.
"""
from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from ..kinematics.fk import WitnessCloud
from ..kinematics.skeleton import Skeleton


def _channel(x: Tensor, lo: int, hi: int) -> Tensor:
    """Slice the last axis, keeping dimensionality."""
    return ad.take(x, (Ellipsis, slice(lo, hi)))


def _norm_last(x: Tensor) -> Tensor:
    return ad.sqrt(ad.reduce_sum(ad.mul(x, x), axis=-1, keepdims=True))


def _cross(a: Tensor, b: Tensor) -> Tensor:
    ax, ay, az = _channel(a, 0, 1), _channel(a, 1, 2), _channel(a, 2, 3)
    bx, by, bz = _channel(b, 0, 1), _channel(b, 1, 2), _channel(b, 2, 3)
    return ad.concat([
        ad.sub(ad.mul(ay, bz), ad.mul(az, by)),
        ad.sub(ad.mul(az, bx), ad.mul(ax, bz)),
        ad.sub(ad.mul(ax, by), ad.mul(ay, bx)),
    ], axis=-1)


def rot6d_to_matrix_t(r: Tensor) -> Tensor:
    """(..., 6) -> (..., 3, 3) by Gram-Schmidt, columns (b1, b2, b1 x b2)."""
    a1 = _channel(r, 0, 3)
    a2 = _channel(r, 3, 6)
    b1 = ad.div(a1, _norm_last(a1))
    projection = ad.reduce_sum(ad.mul(b1, a2), axis=-1, keepdims=True)
    u2 = ad.sub(a2, ad.mul(projection, b1))
    b2 = ad.div(u2, _norm_last(u2))
    b3 = _cross(b1, b2)
    lead = r.shape[:-1]
    columns = [ad.reshape(b, lead + (3, 1)) for b in (b1, b2, b3)]
    return ad.concat(columns, axis=-1)


def fk_t(skeleton: Skeleton, frames: Tensor) -> tuple[list[Tensor], list[Tensor]]:
    """Differentiable FK over a (N, 153) batch of pose vectors.

    Returns per-joint lists of world positions (N, 3) and rotations
    (N, 3, 3), indexed by joint, to avoid re-slicing a packed tensor.
    """
    n = frames.shape[0]
    root_pos = _channel(frames, 0, 3)
    root_rot = rot6d_to_matrix_t(_channel(frames, 3, 9))
    joint6d = ad.reshape(_channel(frames, 9, frames.shape[-1]), (n, skeleton.num_joints, 6))
    local = rot6d_to_matrix_t(joint6d)  # (N, J, 3, 3)

    positions: list = [None] * skeleton.num_joints
    rotations: list = [None] * skeleton.num_joints
    for j in skeleton.topological_order():
        local_j = ad.take(local, (slice(None), j))
        parent = skeleton.parent_index[j]
        if parent < 0:
            rotations[j] = ad.matmul(root_rot, local_j)
            positions[j] = root_pos
            continue
        offset = Tensor(skeleton.bone_offsets[j].reshape(3, 1))
        step = ad.reshape(ad.matmul(rotations[parent], offset), (n, 3))
        positions[j] = ad.add(positions[parent], step)
        rotations[j] = ad.matmul(rotations[parent], local_j)
    return positions, rotations


def witness_points_t(skeleton: Skeleton, cloud: WitnessCloud, frames: Tensor) -> Tensor:
    """Differentiable witness map: (N, 153) -> (N, J * P, 3)."""
    n = frames.shape[0]
    positions, rotations = fk_t(skeleton, frames)
    pieces = []
    for j in range(skeleton.num_joints):
        offsets = Tensor(cloud.local_offsets[j].T)  # (3, P)
        world = ad.matmul(rotations[j], offsets)  # (N, 3, P)
        world = ad.transpose(world, (0, 2, 1))  # (N, P, 3)
        center = ad.reshape(positions[j], (n, 1, 3))
        pieces.append(ad.add(center, world))
    return ad.concat(pieces, axis=1)
