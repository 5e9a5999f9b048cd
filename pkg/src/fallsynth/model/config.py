"""Model hyperparameters."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from ..kinematics.pose import POSE_DIM

COMBINE_MODES = ("addition", "concatenation")


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    """Width/depth of the three encoder/decoder pairs and loss weights.

    latent_dim doubles as the transformer width: the encoder's distribution
    tokens are read directly as mu and log-variance, so latent and model
    width coincide.  combine_mode selects how the decoder memory merges the
    shifted latent with the initial-pose embedding.
    """

    latent_dim: int = 64
    num_layers: int = 2
    num_heads: int = 4
    ff_dim: int = 128
    pose_dim: int = POSE_DIM
    max_frames: int = 240
    combine_mode: str = "addition"
    w_param: float = 1.0
    w_kl: float = 1e-4
    w_vertex: float = 1.0
    w_init: float = 1.0

    def __post_init__(self):
        if self.latent_dim <= 0 or self.latent_dim % self.num_heads != 0:
            raise InvalidConfig(
                f"latent_dim {self.latent_dim} must be a positive multiple of num_heads {self.num_heads}")
        if self.combine_mode not in COMBINE_MODES:
            raise InvalidConfig(f"combine_mode must be one of {COMBINE_MODES}, got {self.combine_mode!r}")
        if self.num_layers < 1 or self.ff_dim < 1 or self.max_frames < 1:
            raise InvalidConfig("num_layers, ff_dim and max_frames must be positive")
        if self.pose_dim != POSE_DIM:
            raise InvalidConfig(f"pose_dim must be {POSE_DIM}, got {self.pose_dim}")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)
