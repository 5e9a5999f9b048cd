"""Forward kinematics and the witness-point surrogate for mesh vertices.

All functions accept either a single flat pose vector or an arbitrarily
batched array of them (leading axes are preserved).  For a skeleton with J
joints the flat pose layout is [root_translation (3), root_rotation (6),
J x 6 relative joint rotations], 9 + 6J scalars.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pose import Pose
from .rotation import rot6d_to_matrix
from .skeleton import Skeleton


@dataclass(frozen=True)
class WitnessCloud:
    """Fixed bone-local points transformed by FK, standing in for mesh vertices.

    The offsets are constant for a skeleton preset, so witness positions are a
    deterministic function of the pose; with points on more than one axis the
    cloud is sensitive to bone orientation, not just joint position.
    """

    points_per_joint: int
    local_offsets: np.ndarray = field(repr=False)  # (J, P, 3), meters

    def __post_init__(self):
        off = np.asarray(self.local_offsets, dtype=np.float64)
        if off.ndim != 3 or off.shape[1] != self.points_per_joint or off.shape[2] != 3:
            raise ValueError(f"local_offsets must be (J, {self.points_per_joint}, 3), got {off.shape}")
        object.__setattr__(self, "local_offsets", off)

    @classmethod
    def default(cls, skeleton: Skeleton, points_per_joint: int = 6, radius: float = 0.08) -> "WitnessCloud":
        """Points at +-radius along the three bone-local axes (up to 6 per joint)."""
        if not 1 <= points_per_joint <= 6:
            raise ValueError("points_per_joint must be in 1..6")
        directions = np.array(
            [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
            dtype=np.float64,
        )[:points_per_joint]
        offsets = np.tile(radius * directions, (skeleton.num_joints, 1, 1))
        return cls(points_per_joint=points_per_joint, local_offsets=offsets)


def _split_pose(skeleton: Skeleton, pose) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(pose, Pose):
        pose = pose.to_vector()
    v = np.asarray(pose, dtype=np.float64)
    j = skeleton.num_joints
    if v.shape[-1] != 9 + 6 * j:
        raise ValueError(f"pose vector length {v.shape[-1]} does not match skeleton ({9 + 6 * j})")
    root_pos = v[..., 0:3]
    root_rot = v[..., 3:9]
    joints = v[..., 9:].reshape(v.shape[:-1] + (j, 6))
    return root_pos, root_rot, joints


def fk_transforms(skeleton: Skeleton, pose) -> tuple[np.ndarray, np.ndarray]:
    """World positions (..., J, 3) and world rotations (..., J, 3, 3)."""
    root_pos, root_rot, joints = _split_pose(skeleton, pose)
    local = rot6d_to_matrix(joints)  # (..., J, 3, 3)
    body = rot6d_to_matrix(root_rot)  # (..., 3, 3)

    lead = root_pos.shape[:-1]
    j = skeleton.num_joints
    positions = np.zeros(lead + (j, 3))
    rotations = np.zeros(lead + (j, 3, 3))
    for idx in skeleton.topological_order():
        p = skeleton.parent_index[idx]
        if p < 0:
            positions[..., idx, :] = root_pos
            rotations[..., idx, :, :] = body @ local[..., idx, :, :]
        else:
            parent_rot = rotations[..., p, :, :]
            offset = skeleton.bone_offsets[idx]
            positions[..., idx, :] = positions[..., p, :] + (parent_rot @ offset)
            rotations[..., idx, :, :] = parent_rot @ local[..., idx, :, :]
    return positions, rotations


def forward_kinematics(skeleton: Skeleton, pose) -> np.ndarray:
    """World joint positions (..., J, 3) for a flat pose vector or Pose."""
    return fk_transforms(skeleton, pose)[0]


def witness_points(skeleton: Skeleton, cloud: WitnessCloud, pose) -> np.ndarray:
    """World witness positions (..., J * points_per_joint, 3).

    Each point is its joint's world position plus the joint's world rotation
    applied to the bone-local offset.
    """
    positions, rotations = fk_transforms(skeleton, pose)
    # (..., J, 3, 3) @ (J, 3, P) -> (..., J, 3, P)
    local = np.swapaxes(cloud.local_offsets, 1, 2)
    world = rotations @ local
    points = positions[..., :, None] + world  # (..., J, 3, P)
    points = np.swapaxes(points, -1, -2)  # (..., J, P, 3)
    lead = points.shape[:-3]
    return points.reshape(lead + (skeleton.num_joints * cloud.points_per_joint, 3))
