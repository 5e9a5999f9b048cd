"""Distribution metrics over recognizer embeddings.

fid follows the Frechet form ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2))
with the cross term computed as the nuclear norm of S1^(1/2) S2^(1/2), which
equals Tr((S1^(1/2) S2 S1^(1/2))^(1/2)) and stays real; diversity is the
mean distance over randomly sampled embedding pairs.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..dataset.attributes import AttributeConfig
from ..dataset.sequence import MotionSequence
from .recognizer import HEADS, FallRecognizer, class_targets

COVARIANCE_REGULARIZATION = 1e-6
PSD_TOLERANCE = 1e-8
DEFAULT_NUM_PAIRS = 200


class TooFewEmbeddings(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class DegenerateCovariance(ValueError):
    pass


@dataclass
class EmbeddingSet:
    """A set of embeddings plus its fitted Gaussian."""

    embeddings: np.ndarray
    mean: np.ndarray = field(init=False)
    covariance: np.ndarray = field(init=False)

    def __post_init__(self):
        e = np.asarray(self.embeddings, dtype=np.float64)
        if e.ndim != 2 or e.shape[0] < 2:
            raise TooFewEmbeddings(f"need an (n >= 2, d) array, got shape {e.shape}")
        self.embeddings = e
        self.mean = e.mean(axis=0)
        cov = np.cov(e, rowvar=False)
        self.covariance = (cov + cov.T) / 2.0
        smallest = np.linalg.eigvalsh(self.covariance).min()
        if smallest < -PSD_TOLERANCE:
            raise DegenerateCovariance(f"covariance has eigenvalue {smallest}")

    @property
    def count(self) -> int:
        return self.embeddings.shape[0]


def _as_set(value) -> EmbeddingSet:
    return value if isinstance(value, EmbeddingSet) else EmbeddingSet(value)


def _symmetric_root(s: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(s)
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T


def _sqrt_trace_of_product(s1: np.ndarray, s2: np.ndarray) -> float:
    """Tr((S1 S2)^(1/2)) as the nuclear norm of S1^(1/2) S2^(1/2).

    The singular values of S1^(1/2) S2^(1/2) are the square roots of the
    eigenvalues of S2^(1/2) S1 S2^(1/2), so the sums agree; the SVD resolves
    near-zero singular values to absolute accuracy ~eps * ||S||, where the
    eigh-of-product route loses half the digits under the final sqrt and can
    leave a ~1e-6 residue on rank-deficient covariances."""
    cross = _symmetric_root(s1) @ _symmetric_root(s2)
    return float(np.linalg.svd(cross, compute_uv=False).sum())


def fid(real, generated) -> float:
    """Frechet distance between the two fitted Gaussians."""
    a, b = _as_set(real), _as_set(generated)
    d = a.mean.shape[0]
    s1 = a.covariance + COVARIANCE_REGULARIZATION * np.eye(d)
    s2 = b.covariance + COVARIANCE_REGULARIZATION * np.eye(d)
    shift = float(((a.mean - b.mean) ** 2).sum())
    value = shift + float(np.trace(s1) + np.trace(s2)) - 2.0 * _sqrt_trace_of_product(s1, s2)
    if not np.isfinite(value):
        raise DegenerateCovariance("non-finite distance despite regularization")
    return max(value, 0.0)


def diversity(embeddings, num_pairs: int = DEFAULT_NUM_PAIRS, rng=None) -> float:
    """Mean distance between ``num_pairs`` random pairs of distinct rows."""
    e = embeddings.embeddings if isinstance(embeddings, EmbeddingSet) else np.asarray(embeddings)
    n = e.shape[0]
    if n < 2:
        raise TooFewEmbeddings(f"need at least 2 embeddings, got {n}")
    if num_pairs < 1:
        raise ValueError(f"num_pairs must be positive, got {num_pairs}")
    if rng is None:
        rng = np.random.default_rng(0)
    first = rng.integers(0, n, size=num_pairs)
    second = rng.integers(0, n - 1, size=num_pairs)
    second = np.where(second >= first, second + 1, second)  # uniform over b != a
    return float(np.linalg.norm(e[first] - e[second], axis=-1).mean())


def _sequences_and_attrs(generated) -> tuple[list[MotionSequence], list[AttributeConfig]]:
    sequences, attrs = [], []
    for item in generated:
        if isinstance(item, MotionSequence):
            sequences.append(item)
            attrs.append(item.attributes)
        else:
            seq, conditioning = item
            sequences.append(seq)
            attrs.append(conditioning)
    return sequences, attrs


def recognition_accuracy(model: FallRecognizer, generated) -> dict[str, float]:
    """Fraction of motions classified as their conditioning label, per head
    plus the unweighted mean.  Accepts sequences or (sequence, attrs) pairs."""
    generated = list(generated)
    if not generated:
        raise EmptyInput("no generated sequences to score")
    sequences, attrs = _sequences_and_attrs(generated)
    predictions = model.predict(sequences)
    truth = {
        "impact": np.array([a.impact_class() for a in attrs]),
        "glitch": np.array([a.glitch_class() for a in attrs]),
        "fall": np.array([a.fall_class() for a in attrs]),
    }
    out = {head: float(np.mean(predictions[head] == truth[head])) for head in HEADS}
    out["mean"] = float(np.mean([out[h] for h in HEADS]))
    return out


def config_hash(config: dict | None) -> str:
    return hashlib.sha256(json.dumps(config or {}, sort_keys=True).encode()).hexdigest()[:16]


def evaluation_report(model: FallRecognizer, real_sequences, generated,
                      num_pairs: int = DEFAULT_NUM_PAIRS, rng_seed: int = 0,
                      config: dict | None = None) -> dict:
    """The full metric bundle as a JSON-ready dict."""
    real_set = EmbeddingSet(model.embed(list(real_sequences)))
    sequences, _ = _sequences_and_attrs(list(generated))
    generated_set = EmbeddingSet(model.embed(sequences))
    return {
        "fid": fid(real_set, generated_set),
        "accuracy": recognition_accuracy(model, generated),
        "diversity": diversity(generated_set, num_pairs, np.random.default_rng(rng_seed)),
        "n_real": real_set.count,
        "n_gen": generated_set.count,
        "config_hash": config_hash(config),
    }
