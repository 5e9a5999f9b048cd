"""Skeleton definition and the packaged male/female presets.

Joints form a single-rooted kinematic tree.  The presets use the standard
24-joint SMPL-style topology (pelvis root); male and female share topology
and differ only in bone lengths.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

PRESETS = ("male", "female")
NUM_BODY_JOINTS = 24


class InvalidSkeleton(ValueError):
    """Joint hierarchy violates the single-rooted-tree contract."""


@dataclass(frozen=True)
class Skeleton:
    """A kinematic tree: names, parent links, rest-pose bone offsets (meters)."""

    preset: str
    joint_names: tuple[str, ...]
    parent_index: tuple[int, ...]
    bone_offsets: np.ndarray = field(repr=False)

    def __post_init__(self):
        offsets = np.asarray(self.bone_offsets, dtype=np.float64)
        object.__setattr__(self, "bone_offsets", offsets)
        n = len(self.joint_names)
        if len(self.parent_index) != n or offsets.shape != (n, 3):
            raise InvalidSkeleton("joint_names, parent_index and bone_offsets disagree in length")
        roots = [j for j, p in enumerate(self.parent_index) if p < 0]
        if len(roots) != 1:
            raise InvalidSkeleton(f"expected exactly one root, found {len(roots)}")
        root = roots[0]
        if np.any(offsets[root] != 0.0):
            raise InvalidSkeleton("root bone offset must be the zero vector")
        # Every joint must reach the root without cycles.
        for j in range(n):
            seen = set()
            cur = j
            while cur != root:
                if cur in seen or not (0 <= cur < n):
                    raise InvalidSkeleton(f"joint {j} does not reach the root acyclically")
                seen.add(cur)
                cur = self.parent_index[cur]

    @property
    def num_joints(self) -> int:
        return len(self.joint_names)

    @property
    def root_index(self) -> int:
        return self.parent_index.index(-1)

    def topological_order(self) -> list[int]:
        """Joint indices ordered so every parent precedes its children."""
        order, placed = [], set()
        pending = list(range(self.num_joints))
        while pending:
            remaining = []
            for j in pending:
                p = self.parent_index[j]
                if p < 0 or p in placed:
                    order.append(j)
                    placed.add(j)
                else:
                    remaining.append(j)
            pending = remaining
        return order

    def adjacency_matrix(self) -> np.ndarray:
        """Undirected bone adjacency (no self loops), shape (J, J)."""
        a = np.zeros((self.num_joints, self.num_joints))
        for j, p in enumerate(self.parent_index):
            if p >= 0:
                a[j, p] = a[p, j] = 1.0
        return a

    def rest_positions(self) -> np.ndarray:
        """Joint positions with all rotations identity and root at the origin."""
        pos = np.zeros((self.num_joints, 3))
        for j in self.topological_order():
            p = self.parent_index[j]
            if p >= 0:
                pos[j] = pos[p] + self.bone_offsets[j]
        return pos

    def standing_root_height(self, clearance: float = 0.02) -> float:
        """Root height that puts the lowest rest-pose joint at ground level."""
        return clearance - float(self.rest_positions()[:, 1].min())


def presets_document() -> dict:
    """The versioned skeleton-preset JSON document, verbatim."""
    text = resources.files("fallsynth.kinematics").joinpath("data/skeleton_presets.json").read_text()
    return json.loads(text)


def load_skeleton(preset: str = "male") -> Skeleton:
    """Load a packaged skeleton preset ("male" or "female")."""
    doc = presets_document()
    if preset not in doc["presets"]:
        raise KeyError(f"unknown skeleton preset {preset!r}; available: {sorted(doc['presets'])}")
    skeleton = Skeleton(
        preset=preset,
        joint_names=tuple(doc["joint_names"]),
        parent_index=tuple(doc["parent_index"]),
        bone_offsets=np.array(doc["presets"][preset]["bone_offsets"], dtype=np.float64),
    )
    if skeleton.num_joints != NUM_BODY_JOINTS:
        raise InvalidSkeleton(f"preset {preset!r} must have {NUM_BODY_JOINTS} joints")
    return skeleton
