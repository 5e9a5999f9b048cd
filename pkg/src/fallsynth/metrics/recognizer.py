"""Skeleton-graph convolutional recognizer with three classification heads.

The trunk stacks spatial graph convolutions (two adjacency partitions:
self-loops and the symmetrically normalized bone graph) with 9-tap temporal
convolutions, pooling to one embedding per clip.  Three linear heads score
the impact (location x quality), glitch, and fall vocabularies; the pooled
trunk output doubles as the embedding used by the distribution metrics.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from ..dataset.attributes import NUM_FALL_CLASSES, NUM_GLITCH_CLASSES, NUM_IMPACT_CLASSES
from ..dataset.sequence import MotionSequence
from ..kinematics.fk import forward_kinematics
from ..kinematics.skeleton import Skeleton, load_skeleton
from ..model.layers import Linear, Module, xavier_uniform
from ..model.optim import Adam

HEADS = ("impact", "glitch", "fall")
HEAD_CLASSES = {"impact": NUM_IMPACT_CLASSES, "glitch": NUM_GLITCH_CLASSES, "fall": NUM_FALL_CLASSES}
INPUT_CHANNELS = 6  # world position + frame velocity per joint


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class RecognizerConfig:
    frames: int = 32
    channels: tuple = (16, 32, 64, 64)
    temporal_kernel: int = 9
    temporal_strides: tuple = (1, 2, 2, 2)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["channels"] = list(self.channels)
        d["temporal_strides"] = list(self.temporal_strides)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RecognizerConfig":
        return cls(frames=d["frames"], channels=tuple(d["channels"]),
                   temporal_kernel=d["temporal_kernel"],
                   temporal_strides=tuple(d["temporal_strides"]))


def graph_partitions(skeleton: Skeleton) -> list[np.ndarray]:
    """Two (V, V) aggregation matrices: identity, and D^-1/2 A D^-1/2 over
    the undirected bone graph."""
    adjacency = skeleton.adjacency_matrix()
    degree = adjacency.sum(axis=1)
    scale = 1.0 / np.sqrt(np.maximum(degree, 1.0))
    normalized = adjacency * scale[:, None] * scale[None, :]
    return [np.eye(skeleton.num_joints), normalized]


def sequence_features(skeleton: Skeleton, seq: MotionSequence, frames: int) -> np.ndarray:
    """(frames, V, 6) positions and velocities, linearly resampled in time."""
    positions = forward_kinematics(skeleton, seq.frames)  # (K, V, 3)
    k = positions.shape[0]
    xs = np.linspace(0.0, k - 1.0, frames)
    lo = np.floor(xs).astype(int)
    hi = np.minimum(lo + 1, k - 1)
    w = (xs - lo)[:, None, None]
    resampled = positions[lo] * (1.0 - w) + positions[hi] * w
    velocity = np.diff(resampled, axis=0, prepend=resampled[:1])
    return np.concatenate([resampled, velocity], axis=-1)


class _Block(Module):
    """Spatial graph conv then strided temporal conv, with a residual path."""

    def __init__(self, rng, partitions, c_in: int, c_out: int, kernel: int, stride: int, name: str):
        self.partitions = [Tensor(p) for p in partitions]
        self.kernel = kernel
        self.stride = stride
        self.name = name
        self.spatial = [Tensor(xavier_uniform(rng, c_in, c_out), requires_grad=True)
                        for _ in partitions]
        self.spatial_bias = Tensor(np.zeros(c_out), requires_grad=True)
        self.taps = [Tensor(xavier_uniform(rng, c_out, c_out), requires_grad=True)
                     for _ in range(kernel)]
        self.temporal_bias = Tensor(np.zeros(c_out), requires_grad=True)
        self.residual = None
        if c_in != c_out:
            self.residual = Tensor(xavier_uniform(rng, c_in, c_out), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        batch, t_in, v = x.shape[0], x.shape[1], x.shape[2]
        mixed = None
        for part, weight in zip(self.partitions, self.spatial):
            term = ad.matmul(ad.matmul(part, x), weight)
            mixed = term if mixed is None else ad.add(mixed, term)
        spatial = ad.relu(ad.add(mixed, self.spatial_bias))

        pad = self.kernel // 2
        c_out = spatial.shape[-1]
        zeros = Tensor(np.zeros((batch, pad, v, c_out)))
        padded = ad.concat([zeros, spatial, zeros], axis=1)
        t_out = (t_in - 1) // self.stride + 1
        temporal = None
        for k, tap in enumerate(self.taps):
            window = ad.take(padded, (slice(None), slice(k, k + self.stride * (t_out - 1) + 1, self.stride)))
            term = ad.matmul(window, tap)
            temporal = term if temporal is None else ad.add(temporal, term)
        temporal = ad.add(temporal, self.temporal_bias)

        skip = x if self.residual is None else ad.matmul(x, self.residual)
        if self.stride > 1:
            skip = ad.take(skip, (slice(None), slice(0, t_in, self.stride)))
        return ad.relu(ad.add(temporal, skip))

    def parameters(self):
        out = {f"{self.name}.spatial_bias": self.spatial_bias,
               f"{self.name}.temporal_bias": self.temporal_bias}
        for i, w in enumerate(self.spatial):
            out[f"{self.name}.spatial{i}"] = w
        for i, w in enumerate(self.taps):
            out[f"{self.name}.tap{i}"] = w
        if self.residual is not None:
            out[f"{self.name}.residual"] = self.residual
        return out


class FallRecognizer:
    def __init__(self, config: RecognizerConfig | None = None,
                 skeleton: Skeleton | None = None, rng_seed: int = 0):
        self.config = config if config is not None else RecognizerConfig()
        self.skeleton = skeleton if skeleton is not None else load_skeleton("male")
        rng = np.random.default_rng(rng_seed)
        partitions = graph_partitions(self.skeleton)
        widths = (INPUT_CHANNELS,) + tuple(self.config.channels)
        self.blocks = [
            _Block(rng, partitions, widths[i], widths[i + 1], self.config.temporal_kernel,
                   self.config.temporal_strides[i], f"block{i}")
            for i in range(len(self.config.channels))
        ]
        self.heads = {name: Linear(rng, self.config.channels[-1], HEAD_CLASSES[name], f"head.{name}")
                      for name in HEADS}

    @property
    def embedding_dim(self) -> int:
        return self.config.channels[-1]

    def parameters(self) -> dict[str, Tensor]:
        out = {}
        for block in self.blocks:
            out.update(block.parameters())
        for name in HEADS:
            out.update(self.heads[name].parameters())
        return out

    def load_parameters(self, arrays: dict[str, np.ndarray]):
        params = self.parameters()
        if set(params) != set(arrays):
            raise KeyError("parameter names do not match the checkpoint")
        for name, tensor in params.items():
            tensor.data = arrays[name].astype(np.float64).copy()

    def trunk(self, features) -> Tensor:
        """(B, T, V, 6) -> (B, embedding_dim) pooled over time and joints."""
        x = features if isinstance(features, Tensor) else Tensor(np.asarray(features, dtype=np.float64))
        for block in self.blocks:
            x = block(x)
        return ad.reduce_mean(x, axis=(1, 2))

    def logits(self, features) -> dict[str, Tensor]:
        pooled = self.trunk(features)
        return {name: self.heads[name](pooled) for name in HEADS}

    def features(self, sequences: list[MotionSequence]) -> np.ndarray:
        return np.stack([sequence_features(self.skeleton, s, self.config.frames)
                         for s in sequences])

    def embed(self, sequences: list[MotionSequence], batch_size: int = 16) -> np.ndarray:
        """Trunk embeddings as a plain (n, d) array."""
        rows = []
        for lo in range(0, len(sequences), batch_size):
            rows.append(self.trunk(self.features(sequences[lo:lo + batch_size])).data)
        return np.concatenate(rows, axis=0)

    def predict(self, sequences: list[MotionSequence], batch_size: int = 16) -> dict[str, np.ndarray]:
        """Arg-max class index per head for each sequence."""
        out = {name: [] for name in HEADS}
        for lo in range(0, len(sequences), batch_size):
            logits = self.logits(self.features(sequences[lo:lo + batch_size]))
            for name in HEADS:
                out[name].append(np.argmax(logits[name].data, axis=-1))
        return {name: np.concatenate(chunks) for name, chunks in out.items()}


def class_targets(sequences: list[MotionSequence]) -> dict[str, np.ndarray]:
    return {
        "impact": np.array([s.attributes.impact_class() for s in sequences]),
        "glitch": np.array([s.attributes.glitch_class() for s in sequences]),
        "fall": np.array([s.attributes.fall_class() for s in sequences]),
    }


def cross_entropy(logits: Tensor, labels: np.ndarray) -> Tensor:
    probabilities = ad.softmax(logits, axis=-1)
    picked = ad.take(probabilities, (np.arange(len(labels)), labels))
    return ad.mul(ad.reduce_mean(ad.log(ad.add(picked, 1e-12))), -1.0)


def train_recognizer(sequences: list[MotionSequence], epochs: int = 25, lr: float = 1e-3,
                     batch_size: int = 8, rng_seed: int = 0, holdout: float = 0.2,
                     config: RecognizerConfig | None = None,
                     skeleton: Skeleton | None = None, on_epoch=None):
    """Fit a recognizer; returns (model, report).

    The report carries per-epoch training loss and held-out accuracy per
    head.  Raises InsufficientData when any class that appears has fewer
    than 2 examples.
    """
    targets_all = class_targets(sequences)
    for head, labels in targets_all.items():
        values, counts = np.unique(labels, return_counts=True)
        thin = values[counts < 2]
        if len(sequences) < 4 or thin.size:
            raise InsufficientData(
                f"{head} head: classes {thin.tolist()} have fewer than 2 examples"
                if thin.size else "need at least 4 sequences")

    model = FallRecognizer(config=config, skeleton=skeleton, rng_seed=rng_seed)
    rng = np.random.default_rng(rng_seed)
    order = rng.permutation(len(sequences))
    n_val = max(1, int(round(holdout * len(sequences))))
    val_idx, train_idx = order[:n_val], order[n_val:]

    features = model.features(sequences)
    optimizer = Adam(model.parameters(), lr=lr)
    history = []
    for epoch in range(1, epochs + 1):
        epoch_order = rng.permutation(train_idx)
        total = 0.0
        batches = 0
        for lo in range(0, len(epoch_order), batch_size):
            idx = epoch_order[lo:lo + batch_size]
            logits = model.logits(features[idx])
            loss = None
            for head in HEADS:
                term = cross_entropy(logits[head], targets_all[head][idx])
                loss = term if loss is None else ad.add(loss, term)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item()
            batches += 1
        record = {"epoch": epoch, "loss": total / batches}
        history.append(record)
        if on_epoch is not None:
            on_epoch(record)

    val_sequences = [sequences[i] for i in val_idx]
    predictions = model.predict(val_sequences)
    accuracy = {head: float(np.mean(predictions[head] == targets_all[head][val_idx]))
                for head in HEADS}
    accuracy["mean"] = float(np.mean([accuracy[h] for h in HEADS]))
    report = {"history": history, "val_accuracy": accuracy,
              "n_train": int(train_idx.size), "n_val": int(val_idx.size)}
    return model, report


def save_recognizer(path, model: FallRecognizer, step: int = 0):
    from ..model.checkpoint import save_checkpoint

    config = dict(model.config.as_dict(), kind="recognizer", preset=model.skeleton.preset)
    save_checkpoint(path, config, {n: p.data for n, p in model.parameters().items()}, step=step)


def load_recognizer(path) -> FallRecognizer:
    from ..model.checkpoint import CorruptCheckpoint, load_checkpoint

    config, params, _, _ = load_checkpoint(path)
    kind = config.pop("kind", None)
    if kind != "recognizer":
        raise CorruptCheckpoint(f"{path}: expected a recognizer checkpoint, got {kind!r}")
    preset = config.pop("preset", "male")
    model = FallRecognizer(RecognizerConfig.from_dict(config), load_skeleton(preset))
    model.load_parameters(params)
    return model
