"""Three-phase attribute-conditioned VAE over pose sequences.

One encoder/decoder pair per phase.  Each encoder prepends a distribution
token pair and an attribute token to the projected pose frames and reads the
first two outputs as mu and log-variance.  Each decoder shifts the latent by
an attribute bias token, merges it with an initial-pose embedding into a
one-token memory, and cross-attends positional-encoding queries against it.
At inference the phases chain: the last generated frame of one phase is the
initial pose of the next.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from ..dataset.attributes import (
    AttributeConfig,
    FALL_QUALITIES,
    GLITCH_QUALITIES,
    IMPACT_LOCATIONS,
    IMPACT_QUALITIES,
    UnknownLabel,
)
from ..dataset.sequence import MotionSequence, PHASES
from ..kinematics.pose import POSE_DIM, Pose, rest_pose
from ..kinematics.skeleton import Skeleton, load_skeleton
from .config import ModelConfig
from .layers import (
    DecoderLayer,
    EncoderLayer,
    LayerNorm,
    Linear,
    sinusoidal_positional_encoding,
)

TOKEN_INIT_SCALE = 0.02


class FrameCountOutOfRange(ValueError):
    pass


@dataclass
class LatentDistribution:
    """Diagonal Gaussian in latent space; sigma = exp(logvar / 2)."""

    mu: Tensor
    logvar: Tensor


def _tile(token: Tensor, batch: int, length: int = 1) -> Tensor:
    """Broadcast a (D,) token to (batch, length, D) with gradient summing."""
    dim = token.shape[-1]
    token = ad.reshape(token, (1, 1, dim))
    return ad.mul(token, Tensor(np.ones((batch, length, 1))))


class _PhaseEncoder:
    def __init__(self, rng, phase: str, config: ModelConfig):
        d = config.latent_dim
        self.phase = phase
        self.in_proj = Linear(rng, config.pose_dim, d, f"enc.{phase}.in_proj")
        self.mu_token = Tensor(rng.normal(0.0, TOKEN_INIT_SCALE, d), requires_grad=True)
        self.logvar_token = Tensor(rng.normal(0.0, TOKEN_INIT_SCALE, d), requires_grad=True)
        self.label_tables = {
            name: Tensor(rng.normal(0.0, TOKEN_INIT_SCALE, (len(vocab), d)), requires_grad=True)
            for name, vocab in _PHASE_VOCABS[phase].items()
        }
        self.layers = [EncoderLayer(rng, d, config.num_heads, config.ff_dim, f"enc.{phase}.layer{i}")
                       for i in range(config.num_layers)]
        self.final_ln = LayerNorm(d, f"enc.{phase}.final_ln")

    def parameters(self):
        out = {f"enc.{self.phase}.mu_token": self.mu_token,
               f"enc.{self.phase}.logvar_token": self.logvar_token}
        for name, table in self.label_tables.items():
            out[f"enc.{self.phase}.label.{name}"] = table
        out.update(self.in_proj.parameters())
        for layer in self.layers:
            out.update(layer.parameters())
        out.update(self.final_ln.parameters())
        return out


class _PhaseDecoder:
    def __init__(self, rng, phase: str, config: ModelConfig):
        d = config.latent_dim
        self.phase = phase
        self.bias_tables = {
            name: Tensor(rng.normal(0.0, TOKEN_INIT_SCALE, (len(vocab), d)), requires_grad=True)
            for name, vocab in _PHASE_VOCABS[phase].items()
        }
        self.init_proj = Linear(rng, config.pose_dim, d, f"dec.{phase}.init_proj")
        self.combine_proj = None
        if config.combine_mode == "concatenation":
            self.combine_proj = Linear(rng, 2 * d, d, f"dec.{phase}.combine_proj")
        self.layers = [DecoderLayer(rng, d, config.num_heads, config.ff_dim, f"dec.{phase}.layer{i}")
                       for i in range(config.num_layers)]
        self.final_ln = LayerNorm(d, f"dec.{phase}.final_ln")
        self.out_proj = Linear(rng, d, config.pose_dim, f"dec.{phase}.out_proj")

    def parameters(self):
        out = {}
        for name, table in self.bias_tables.items():
            out[f"dec.{self.phase}.bias.{name}"] = table
        out.update(self.init_proj.parameters())
        if self.combine_proj is not None:
            out.update(self.combine_proj.parameters())
        for layer in self.layers:
            out.update(layer.parameters())
        out.update(self.final_ln.parameters())
        out.update(self.out_proj.parameters())
        return out


# Which vocabulary (or vocabularies) conditions each phase.  The impact
# phase has two attribute axes; its token is the SUM of a location embedding
# and a quality embedding, keeping the table count linear in vocab sizes.
_PHASE_VOCABS = {
    "impact": {"impact_location": IMPACT_LOCATIONS, "impact_quality": IMPACT_QUALITIES},
    "glitch": {"glitch_quality": GLITCH_QUALITIES},
    "fall": {"fall_quality": FALL_QUALITIES},
}


def _phase_labels(phase: str, attrs: AttributeConfig):
    if phase == "impact":
        return (attrs.impact_location, attrs.impact_quality)
    if phase == "glitch":
        return attrs.glitch_quality
    return attrs.fall_quality


def _label_indices(phase: str, labels) -> dict[str, np.ndarray]:
    """Map a batch of labels to one index array per vocabulary axis."""
    out = {}
    for name, vocab in _PHASE_VOCABS[phase].items():
        idx = []
        for label in labels:
            parts = label if isinstance(label, tuple) else (label,)
            value = None
            for part in parts:
                if part in vocab:
                    value = part
            if value is None:
                bad = parts[0] if len(parts) == 1 else parts
                raise UnknownLabel(name, bad, vocab)
            idx.append(vocab.index(value))
        out[name] = np.array(idx)
    return out


def _label_token(tables: dict[str, Tensor], phase: str, labels) -> Tensor:
    """(B, D) attribute embedding; the impact phase sums its two axes."""
    token = None
    for name, idx in _label_indices(phase, labels).items():
        emb = ad.embedding_lookup(tables[name], idx)
        token = emb if token is None else ad.add(token, emb)
    return token


class AttributeCvae:
    """The full three-phase model; owns one encoder/decoder pair per phase."""

    def __init__(self, config: ModelConfig, skeleton: Skeleton | None = None, rng_seed: int = 0):
        self.config = config
        self.skeleton = skeleton if skeleton is not None else load_skeleton("male")
        rng = np.random.default_rng(rng_seed)
        self.encoders = {phase: _PhaseEncoder(rng, phase, config) for phase in PHASES}
        self.decoders = {phase: _PhaseDecoder(rng, phase, config) for phase in PHASES}

    def parameters(self) -> dict[str, Tensor]:
        out = {}
        for phase in PHASES:
            out.update(self.encoders[phase].parameters())
        for phase in PHASES:
            out.update(self.decoders[phase].parameters())
        return out

    def load_parameters(self, arrays: dict[str, np.ndarray]):
        params = self.parameters()
        missing = set(params) - set(arrays)
        extra = set(arrays) - set(params)
        if missing or extra:
            raise KeyError(f"parameter names do not match: missing {sorted(missing)[:3]}, "
                           f"unexpected {sorted(extra)[:3]}")
        for name, tensor in params.items():
            if tensor.data.shape != arrays[name].shape:
                raise ValueError(f"shape mismatch for {name}: "
                                 f"{tensor.data.shape} vs {arrays[name].shape}")
            tensor.data = arrays[name].astype(np.float64).copy()

    def _check_frames(self, count: int):
        if not 1 <= count <= self.config.max_frames:
            raise FrameCountOutOfRange(
                f"frame count {count} outside [1, {self.config.max_frames}]")

    def encode(self, phase: str, poses, labels) -> LatentDistribution:
        """Posterior (mu, logvar) for one phase segment.

        ``poses`` is (T, 153) for one sequence or (B, T, 153) for a batch;
        ``labels`` is the phase attribute value, or a list of them when
        batched (impact labels are (location, quality) pairs).
        """
        x = poses if isinstance(poses, Tensor) else Tensor(np.asarray(poses, dtype=np.float64))
        single = x.ndim == 2
        if single:
            x = ad.reshape(x, (1,) + x.shape)
            labels = [labels]
        batch, length = x.shape[0], x.shape[1]
        self._check_frames(length)
        enc = self.encoders[phase]
        label_tok = ad.reshape(_label_token(enc.label_tables, phase, labels), (batch, 1, -1))
        frames = enc.in_proj(x)
        tokens = ad.concat([_tile(enc.mu_token, batch), _tile(enc.logvar_token, batch),
                            label_tok, frames], axis=1)
        tokens = ad.add(tokens, Tensor(sinusoidal_positional_encoding(length + 3, self.config.latent_dim)))
        for layer in enc.layers:
            tokens = layer(tokens)
        tokens = enc.final_ln(tokens)
        mu = ad.take(tokens, (slice(None), 0))
        logvar = ad.take(tokens, (slice(None), 1))
        if single:
            mu = ad.reshape(mu, (self.config.latent_dim,))
            logvar = ad.reshape(logvar, (self.config.latent_dim,))
        return LatentDistribution(mu=mu, logvar=logvar)

    def reparameterize(self, dist: LatentDistribution, rng: np.random.Generator) -> Tensor:
        """z = mu + exp(logvar/2) * eps with eps ~ N(0, I); gradients reach
        mu and logvar only."""
        eps = Tensor(rng.standard_normal(dist.mu.shape))
        sigma = ad.exp(ad.mul(dist.logvar, 0.5))
        return ad.add(dist.mu, ad.mul(sigma, eps))

    def decode(self, phase: str, z, labels, initial_pose, frame_count: int) -> Tensor:
        """Deterministic decoding of ``frame_count`` pose vectors."""
        self._check_frames(frame_count)
        z_t = z if isinstance(z, Tensor) else Tensor(np.asarray(z, dtype=np.float64))
        single = z_t.ndim == 1
        if single:
            z_t = ad.reshape(z_t, (1, -1))
            labels = [labels]
        batch = z_t.shape[0]
        if isinstance(initial_pose, Tensor):
            init_t = initial_pose if initial_pose.ndim == 2 else ad.reshape(initial_pose, (1, POSE_DIM))
        else:
            vec = initial_pose.to_vector() if isinstance(initial_pose, Pose) else np.asarray(initial_pose, dtype=np.float64)
            init_t = Tensor(vec.reshape(-1, POSE_DIM))

        dec = self.decoders[phase]
        shifted = ad.add(z_t, _label_token(dec.bias_tables, phase, labels))
        init_emb = dec.init_proj(init_t)
        if self.config.combine_mode == "addition":
            memory = ad.add(shifted, init_emb)
        else:
            memory = dec.combine_proj(ad.concat([shifted, init_emb], axis=-1))
        memory = ad.reshape(memory, (batch, 1, self.config.latent_dim))

        queries = _tile_queries(batch, frame_count, self.config.latent_dim)
        x = queries
        for layer in dec.layers:
            x = layer(x, memory)
        x = dec.final_ln(x)
        out = dec.out_proj(x)
        if single:
            out = ad.reshape(out, (frame_count, POSE_DIM))
        return out

    def forward_train(self, sequences, rng: np.random.Generator):
        """Encode/decode every phase of a batch with teacher forcing.

        All sequences in the batch must share their duration triple.  The
        initial guidance pose per phase is the ground-truth boundary frame
        (frame 0, frame M-1, frame N-1).  Returns ({phase: (B, T, 153)},
        {phase: LatentDistribution}).
        """
        if isinstance(sequences, MotionSequence):
            sequences = [sequences]
        durations = sequences[0].durations
        for seq in sequences[1:]:
            if seq.durations != durations:
                raise ValueError(f"batch mixes durations {durations} and {seq.durations}")
        recons: dict = {}
        dists: dict = {}
        for phase in PHASES:
            poses = np.stack([seq.phase_frames(phase) for seq in sequences])
            labels = [_phase_labels(phase, seq.attributes) for seq in sequences]
            guide_index = {"impact": 0, "glitch": sequences[0].impact_end - 1,
                           "fall": sequences[0].glitch_end - 1}[phase]
            init = np.stack([seq.frames[guide_index] for seq in sequences])
            dist = self.encode(phase, poses, labels)
            z = self.reparameterize(dist, rng)
            recons[phase] = self.decode(phase, z, labels, init, poses.shape[1])
            dists[phase] = dist
        return recons, dists

    def generate(self, attrs: AttributeConfig, durations=(12, 16, 20), rng=None,
                 start_pose: Pose | None = None, fps: float = 24.0, return_trace: bool = False):
        """Sample one sequence: z ~ N(0, I) per phase, phases chained through
        their last generated frames."""
        if rng is None:
            rng = np.random.default_rng(0)
        d_impact, d_glitch, d_fall = (int(d) for d in durations)
        if start_pose is None:
            start_pose = rest_pose(self.skeleton)
        initial = start_pose.to_vector()
        trace = {"initial_pose": {}, "z": {}}
        chunks = []
        for phase, count in zip(PHASES, (d_impact, d_glitch, d_fall)):
            z = rng.standard_normal(self.config.latent_dim)
            labels = _phase_labels(phase, attrs)
            trace["initial_pose"][phase] = initial
            trace["z"][phase] = z
            out = self.decode(phase, z, labels, initial, count).data
            chunks.append(out)
            initial = out[-1]
        frames = np.concatenate(chunks, axis=0)
        seq = MotionSequence(fps=float(fps), frames=frames, impact_end=d_impact,
                             glitch_end=d_impact + d_glitch, attributes=attrs)
        return (seq, trace) if return_trace else seq


def _tile_queries(batch: int, length: int, dim: int) -> Tensor:
    pe = sinusoidal_positional_encoding(length, dim)
    return Tensor(np.broadcast_to(pe, (batch, length, dim)).copy())
