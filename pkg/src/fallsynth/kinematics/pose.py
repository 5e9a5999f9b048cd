"""Single-frame pose parameters and their flat 153-scalar layout.

Flat layout: [root_translation (3), root_rotation (6), joint_rotations (24 x 6)].
The root joint's world rotation is root_rotation composed with its own
relative rotation (joint_rotations[0]); all other joint rotations are
relative to the parent joint.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rotation import IDENTITY_6D
from .skeleton import NUM_BODY_JOINTS, Skeleton

POSE_DIM = 3 + 6 + NUM_BODY_JOINTS * 6  # 153

ROOT_POS = slice(0, 3)
ROOT_ROT = slice(3, 9)
JOINT_ROT = slice(9, POSE_DIM)


@dataclass(frozen=True)
class Pose:
    """One frame: root translation (m), root rotation (6D), 24 relative joint rotations (6D)."""

    root_translation: np.ndarray
    root_rotation: np.ndarray
    joint_rotations: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.root_translation, dtype=np.float64).reshape(3)
        r = np.asarray(self.root_rotation, dtype=np.float64).reshape(6)
        j = np.asarray(self.joint_rotations, dtype=np.float64).reshape(NUM_BODY_JOINTS, 6)
        object.__setattr__(self, "root_translation", t)
        object.__setattr__(self, "root_rotation", r)
        object.__setattr__(self, "joint_rotations", j)

    def to_vector(self) -> np.ndarray:
        v = np.empty(POSE_DIM)
        v[ROOT_POS] = self.root_translation
        v[ROOT_ROT] = self.root_rotation
        v[JOINT_ROT] = self.joint_rotations.reshape(-1)
        return v

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "Pose":
        v = np.asarray(v, dtype=np.float64).reshape(POSE_DIM)
        return cls(v[ROOT_POS], v[ROOT_ROT], v[JOINT_ROT].reshape(NUM_BODY_JOINTS, 6))


def rest_pose(skeleton: Skeleton, standing: bool = True) -> Pose:
    """Rest pose at the world origin; standing puts the feet on the ground."""
    height = skeleton.standing_root_height() if standing else 0.0
    return Pose(
        root_translation=np.array([0.0, height, 0.0]),
        root_rotation=IDENTITY_6D.copy(),
        joint_rotations=np.tile(IDENTITY_6D, (NUM_BODY_JOINTS, 1)),
    )
