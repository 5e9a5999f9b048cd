import numpy as np
import pytest

from fallsynth.dataset.synthetic import synthesize_dataset
from fallsynth.kinematics.fk import WitnessCloud
from fallsynth.kinematics.skeleton import load_skeleton
from fallsynth.model.config import ModelConfig


@pytest.fixture(scope="session")
def skeleton():
    return load_skeleton("male")


@pytest.fixture(scope="session")
def female_skeleton():
    return load_skeleton("female")


@pytest.fixture(scope="session")
def cloud(skeleton):
    return WitnessCloud.default(skeleton)


@pytest.fixture(scope="session")
def tiny_config():
    """Smallest config that still exercises every code path."""
    return ModelConfig(latent_dim=8, num_layers=1, num_heads=2, ff_dim=16)


@pytest.fixture(scope="session")
def small_dataset():
    """24 balanced trials at the default durations."""
    return synthesize_dataset(24, master_seed=11)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)


def random_pose_frames(rng, n: int) -> np.ndarray:
    """Valid random frames: arbitrary root, rotations projected on-manifold."""
    from fallsynth.dataset.augment import project_rotations
    from fallsynth.kinematics.pose import POSE_DIM

    frames = rng.normal(0.0, 1.0, (n, POSE_DIM))
    frames[:, 0:3] = rng.normal(0.0, 0.5, (n, 3))
    return project_rotations(frames)
