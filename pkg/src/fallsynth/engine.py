"""Generation facade shared by the CLI and the HTTP service.

Wraps a trained model with the request-level conveniences both front ends
need: attribute validation, seed handling (a missing seed is drawn and
reported back so any result can be replayed), duration bounds, rotation
re-projection, and origin normalization so frame 0 starts at the horizontal
world origin.
"""
from __future__ import annotations

import time

import numpy as np

from .dataset.attributes import AttributeConfig
from .dataset.augment import normalize_origin, project_rotations
from .dataset.sequence import MotionSequence
from .kinematics.pose import rest_pose
from .kinematics.skeleton import load_skeleton
from .model.checkpoint import checkpoint_id, load_model
from .model.cvae import AttributeCvae

DEFAULT_DURATIONS = (12, 16, 20)
MAX_SEED = 2 ** 31 - 1


class DurationOutOfRange(ValueError):
    pass


class GenerationEngine:
    def __init__(self, model: AttributeCvae, checkpoint_path=None):
        self.model = model
        self.checkpoint_path = str(checkpoint_path) if checkpoint_path else None
        self.checkpoint_id = checkpoint_id(checkpoint_path) if checkpoint_path else None

    @classmethod
    def from_checkpoint(cls, path) -> "GenerationEngine":
        model, _, _ = load_model(path)
        return cls(model, checkpoint_path=path)

    def duration_bounds(self) -> tuple[int, int]:
        return 1, self.model.config.max_frames

    def generate(self, attributes, durations=None, seed: int | None = None,
                 body_model: str = "male", fps: float = 24.0) -> tuple[MotionSequence, dict]:
        """-> (sequence, {seed, checkpoint_id, wall_time_ms}).

        The sequence is a pure function of (weights, attributes, durations,
        seed, body_model); wall time is the only varying field.
        """
        started = time.perf_counter()
        if not isinstance(attributes, AttributeConfig):
            attributes = AttributeConfig.from_dict(dict(attributes))
        if durations is None:
            durations = DEFAULT_DURATIONS
        low, high = self.duration_bounds()
        durations = tuple(int(d) for d in durations)
        if len(durations) != 3 or any(d < low or d > high for d in durations):
            raise DurationOutOfRange(
                f"durations must be 3 frame counts in [{low}, {high}], got {durations}")
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % (MAX_SEED + 1))
        start = rest_pose(load_skeleton(body_model))
        seq = self.model.generate(attributes, durations, np.random.default_rng(seed),
                                  start_pose=start, fps=fps)
        seq = normalize_origin(project_rotations(seq))
        metadata = {
            "seed": int(seed),
            "checkpoint_id": self.checkpoint_id,
            "wall_time_ms": (time.perf_counter() - started) * 1000.0,
        }
        return seq, metadata
