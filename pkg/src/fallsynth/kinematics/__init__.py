"""Skeleton presets, 6D rotation algebra, forward kinematics, witness points."""
from .fk import WitnessCloud, fk_transforms, forward_kinematics, witness_points
from .pose import JOINT_ROT, POSE_DIM, ROOT_POS, ROOT_ROT, Pose, rest_pose
from .rotation import (
    DEGENERACY_EPS,
    IDENTITY_6D,
    ORTHONORMALITY_TOL,
    DegenerateRotation,
    NotARotation,
    matrix_to_rot6d,
    rot6d_to_matrix,
    rotation_x,
    rotation_y,
    rotation_z,
    yaw_matrix,
)
from .skeleton import NUM_BODY_JOINTS, PRESETS, InvalidSkeleton, Skeleton, load_skeleton, presets_document

__all__ = [
    "DEGENERACY_EPS",
    "IDENTITY_6D",
    "JOINT_ROT",
    "NUM_BODY_JOINTS",
    "ORTHONORMALITY_TOL",
    "POSE_DIM",
    "PRESETS",
    "ROOT_POS",
    "ROOT_ROT",
    "DegenerateRotation",
    "InvalidSkeleton",
    "NotARotation",
    "Pose",
    "Skeleton",
    "WitnessCloud",
    "fk_transforms",
    "forward_kinematics",
    "load_skeleton",
    "matrix_to_rot6d",
    "presets_document",
    "rest_pose",
    "rot6d_to_matrix",
    "rotation_x",
    "rotation_y",
    "rotation_z",
    "witness_points",
    "yaw_matrix",
]
