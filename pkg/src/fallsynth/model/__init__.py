"""Phase-wise attribute-conditioned VAE, its loss, optimizer, training loop,
and checkpoint format."""
from .checkpoint import (
    CHECKPOINT_VERSION,
    CorruptCheckpoint,
    checkpoint_id,
    load_checkpoint,
    load_model,
    save_checkpoint,
    save_model,
)
from .config import COMBINE_MODES, InvalidConfig, ModelConfig
from .cvae import AttributeCvae, FrameCountOutOfRange, LatentDistribution
from .diffkin import fk_t, rot6d_to_matrix_t, witness_points_t
from .losses import compute_loss, kl_divergence
from .optim import Adam
from .training import LOSS_TERMS, train

__all__ = [
    "CHECKPOINT_VERSION",
    "CorruptCheckpoint",
    "checkpoint_id",
    "load_checkpoint",
    "load_model",
    "save_checkpoint",
    "save_model",
    "COMBINE_MODES",
    "InvalidConfig",
    "ModelConfig",
    "AttributeCvae",
    "FrameCountOutOfRange",
    "LatentDistribution",
    "fk_t",
    "rot6d_to_matrix_t",
    "witness_points_t",
    "compute_loss",
    "kl_divergence",
    "Adam",
    "LOSS_TERMS",
    "train",
]
