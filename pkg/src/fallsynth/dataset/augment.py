"""Origin normalization and the two dataset augmentations.

``augment_fft`` perturbs each phase segment in the frequency domain (per
scalar channel of the flat pose series), protecting the lowest bins so the
global trajectory survives, then crossfades the perturbation in and out
over 3 frames around each internal phase boundary so the result stays
continuous.  ``augment_yaw`` rotates a whole trial about the vertical axis
through the world origin.
"""
from __future__ import annotations

import numpy as np

from ..kinematics.pose import JOINT_ROT, POSE_DIM, ROOT_POS, ROOT_ROT
from ..kinematics.rotation import matrix_to_rot6d, rot6d_to_matrix, yaw_matrix
from .sequence import EmptySequence, MotionSequence

CROSSFADE_FRAMES = 3


class SequenceTooShort(ValueError):
    """Sequence below the minimum length for frequency-domain augmentation."""


class InvalidJitterRange(ValueError):
    """Jitter parameters outside their allowed ranges."""


def normalize_origin(seq: MotionSequence) -> MotionSequence:
    """Translate every frame so frame 0's horizontal root position is the origin.

    The vertical coordinate is untouched (ground height preserved), so the
    operation is idempotent and preserves all inter-frame displacements.
    """
    if seq.num_frames == 0:
        raise EmptySequence("cannot normalize an empty sequence")
    frames = seq.frames.copy()
    offset = frames[0, ROOT_POS].copy()
    offset[1] = 0.0  # keep ground height
    frames[:, ROOT_POS] -= offset
    return seq.with_frames(frames)


def fft_jitter(channels: np.ndarray, magnitude_jitter: float, phase_jitter: float,
               preserve_low_bins: int, rng: np.random.Generator) -> np.ndarray:
    """Frequency-domain jitter of a (T, C) segment, one real FFT per channel.

    Bins below ``preserve_low_bins`` pass through unchanged; higher bins are
    scaled by Uniform[1-a, 1+a] and phase-shifted by Uniform[-b, b].  The DC
    bin is always protected (preserve_low_bins >= 1), so the per-channel mean
    is preserved exactly.  For even T the Nyquist bin has no conjugate
    partner and only its magnitude is scaled.
    """
    t = channels.shape[0]
    spectrum = np.fft.rfft(channels, axis=0)
    n_bins = spectrum.shape[0]
    factors = rng.uniform(1.0 - magnitude_jitter, 1.0 + magnitude_jitter, size=spectrum.shape)
    shifts = rng.uniform(-phase_jitter, phase_jitter, size=spectrum.shape)
    protected = min(preserve_low_bins, n_bins)
    factors[:protected] = 1.0
    shifts[:protected] = 0.0
    if t % 2 == 0 and n_bins > protected:
        shifts[-1] = 0.0  # Nyquist bin must stay real
    spectrum = spectrum * factors * np.exp(1j * shifts)
    return np.fft.irfft(spectrum, n=t, axis=0)


def _crossfade_weights(num_frames: int, boundaries: tuple[int, int], window: int) -> np.ndarray:
    """Per-frame weight of the augmented signal: 0 at each internal boundary cut,
    ramping linearly to 1 at ``window`` frames away."""
    weights = np.ones(num_frames)
    for b in boundaries:
        for i in range(num_frames):
            dist = b - 1 - i if i < b else i - b
            weights[i] = min(weights[i], min(dist, window) / window)
    return weights


def _reorthonormalize(frames: np.ndarray) -> np.ndarray:
    """Project every 6D rotation channel block back onto the rotation manifold."""
    out = frames.copy()
    rots = np.concatenate(
        [frames[:, ROOT_ROT].reshape(-1, 1, 6), frames[:, JOINT_ROT].reshape(frames.shape[0], -1, 6)],
        axis=1,
    )
    projected = matrix_to_rot6d(rot6d_to_matrix(rots))
    out[:, ROOT_ROT] = projected[:, 0]
    out[:, JOINT_ROT] = projected[:, 1:].reshape(frames.shape[0], -1)
    return out


def project_rotations(seq):
    """Pull every rotation channel back onto the manifold (Gram-Schmidt);
    valid rotations pass through unchanged up to float noise.  Accepts a
    MotionSequence or a raw (K, POSE_DIM) frame array."""
    if isinstance(seq, MotionSequence):
        return seq.with_frames(_reorthonormalize(seq.frames))
    return _reorthonormalize(np.asarray(seq, dtype=np.float64))


def augment_fft(seq: MotionSequence, magnitude_jitter: float, phase_jitter: float,
                preserve_low_bins: int = 2, rng_seed: int = 0) -> MotionSequence:
    """Frequency-domain augmentation of a trial; boundaries and attributes unchanged.

    Each phase segment is transformed independently; jitter can push 6D
    channels off the rotation manifold, so rotations are re-orthonormalized
    (Gram-Schmidt projection) per frame before origin renormalization.
    """
    if not 0.0 <= magnitude_jitter < 1.0:
        raise InvalidJitterRange(f"magnitude_jitter must be in [0, 1), got {magnitude_jitter}")
    if not 0.0 <= phase_jitter < np.pi:
        raise InvalidJitterRange(f"phase_jitter must be in [0, pi), got {phase_jitter}")
    if preserve_low_bins < 1:
        raise InvalidJitterRange(f"preserve_low_bins must be >= 1, got {preserve_low_bins}")
    if seq.num_frames < 4:
        raise SequenceTooShort(f"need at least 4 frames, got {seq.num_frames}")

    rng = np.random.default_rng(rng_seed)
    original = seq.frames
    augmented = np.empty_like(original)
    for phase in ("impact", "glitch", "fall"):
        sl = seq.phase_slice(phase)
        augmented[sl] = fft_jitter(original[sl], magnitude_jitter, phase_jitter, preserve_low_bins, rng)

    lam = _crossfade_weights(seq.num_frames, seq.boundaries, CROSSFADE_FRAMES)[:, None]
    blended = lam * augmented + (1.0 - lam) * original
    blended = _reorthonormalize(blended)
    return normalize_origin(seq.with_frames(blended))


def augment_yaw(seq: MotionSequence, rng_seed: int = 0, angle: float | None = None) -> MotionSequence:
    """Rotate the whole trial about the vertical axis through the world origin.

    The angle is drawn Uniform[0, 2pi) unless given explicitly.  Root
    translation and root rotation are rotated; joint rotations are
    parent-relative and stay untouched, so the motion is rigidly transformed.
    """
    if seq.num_frames == 0:
        raise EmptySequence("cannot augment an empty sequence")
    if angle is None:
        angle = float(np.random.default_rng(rng_seed).uniform(0.0, 2.0 * np.pi))
    rot = yaw_matrix(angle)
    frames = seq.frames.copy()
    frames[:, ROOT_POS] = frames[:, ROOT_POS] @ rot.T
    heading = rot6d_to_matrix(frames[:, ROOT_ROT])
    frames[:, ROOT_ROT] = matrix_to_rot6d(rot @ heading)
    return seq.with_frames(frames)
