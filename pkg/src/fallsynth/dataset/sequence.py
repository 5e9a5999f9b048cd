"""The motion-sequence data model: frames, phase boundaries, attributes."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..kinematics.pose import POSE_DIM, Pose
from .attributes import AttributeConfig

PHASES = ("impact", "glitch", "fall")


class EmptySequence(ValueError):
    """Operation requires at least one frame."""


class InvalidSequence(ValueError):
    """Sequence violates the phase-boundary or shape invariants."""


@dataclass
class MotionSequence:
    """Ordered pose frames with phase boundaries Impact=[0,M), Glitch=[M,N), Fall=[N,K)."""

    fps: float
    frames: np.ndarray = field(repr=False)  # (K, POSE_DIM)
    impact_end: int  # M
    glitch_end: int  # N
    attributes: AttributeConfig

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float64)
        self.validate()

    def validate(self):
        if self.frames.ndim != 2 or self.frames.shape[1] != POSE_DIM:
            raise InvalidSequence(f"frames must be (K, {POSE_DIM}), got {self.frames.shape}")
        k = self.frames.shape[0]
        if k == 0:
            raise EmptySequence("sequence has no frames")
        m, n = self.impact_end, self.glitch_end
        if not (0 < m < n < k):
            raise InvalidSequence(f"phase boundaries must satisfy 0 < M < N < K, got M={m} N={n} K={k}")
        if self.fps <= 0:
            raise InvalidSequence(f"fps must be positive, got {self.fps}")
        if not np.all(np.isfinite(self.frames)):
            raise InvalidSequence("frames contain non-finite values")

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def boundaries(self) -> tuple[int, int]:
        return (self.impact_end, self.glitch_end)

    @property
    def durations(self) -> tuple[int, int, int]:
        """Frame counts per phase (impact, glitch, fall)."""
        return (self.impact_end, self.glitch_end - self.impact_end, self.num_frames - self.glitch_end)

    def phase_slice(self, phase: str) -> slice:
        if phase == "impact":
            return slice(0, self.impact_end)
        if phase == "glitch":
            return slice(self.impact_end, self.glitch_end)
        if phase == "fall":
            return slice(self.glitch_end, self.num_frames)
        raise KeyError(f"unknown phase {phase!r}")

    def phase_frames(self, phase: str) -> np.ndarray:
        return self.frames[self.phase_slice(phase)]

    def pose(self, index: int) -> Pose:
        return Pose.from_vector(self.frames[index])

    def with_frames(self, frames: np.ndarray) -> "MotionSequence":
        """Copy with replaced frames; boundaries and attributes carried over."""
        return replace(self, frames=np.array(frames, dtype=np.float64))

    def copy(self) -> "MotionSequence":
        return self.with_frames(self.frames.copy())
