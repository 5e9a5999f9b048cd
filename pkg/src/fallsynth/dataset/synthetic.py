"""Procedural generator of attribute-conditioned falling sequences.

Stands in for a motion-capture corpus: every attribute value maps to a
distinct, measurable kinematic signature (parameter tables below, mirrored
in docs/attribute_effects.md) so that downstream models have real signal to
learn and recognition accuracy is meaningful.

Construction is phase-local.  Impact and Glitch are additive perturbation
curves on top of a standing pose; Fall re-blends every channel from the last
Glitch frame toward a per-style floor pose, which keeps the whole sequence
continuous no matter how the earlier phases were distorted.
"""
from __future__ import annotations

import numpy as np

from ..kinematics.pose import POSE_DIM
from ..kinematics.rotation import matrix_to_rot6d, rotation_x, rotation_y, rotation_z, yaw_matrix
from ..kinematics.skeleton import Skeleton, load_skeleton
from .attributes import AttributeConfig
from .augment import normalize_origin
from .sequence import MotionSequence

MIN_PHASE_FRAMES = 4
DEFAULT_DURATIONS = (12, 16, 20)
FLOOR_ROOT_HEIGHT = 0.09  # pelvis height when lying on the ground


class DurationTooShort(ValueError):
    """A phase was requested with fewer frames than the generator supports."""


# Joint groups struck by each impact location (names in the 24-joint presets).
IMPACT_LOCATION_JOINTS = {
    "head": ("neck", "head"),
    "torso": ("spine1", "spine2", "spine3"),
    "arms": ("left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
             "left_wrist", "right_wrist"),
    "legs": ("left_hip", "right_hip", "left_knee", "right_knee",
             "left_ankle", "right_ankle"),
}

# amp: peak joint rotation (rad); attack: rise fraction of the phase;
# decay: exponential falloff after the peak; freq: oscillation Hz;
# root_push: horizontal root displacement (m); crouch: vertical root dip (m);
# all_groups: perturbation radiates to every location group.
IMPACT_QUALITY_PARAMS = {
    "push":        dict(amp=0.30, attack=0.55, decay=1.2, freq=0.8, root_push=0.14, crouch=0.00, all_groups=False),
    "prick":       dict(amp=0.16, attack=0.06, decay=5.0, freq=6.0, root_push=0.01, crouch=0.00, all_groups=False),
    "shot":        dict(amp=0.55, attack=0.04, decay=3.0, freq=2.2, root_push=0.06, crouch=0.00, all_groups=False),
    "contraction": dict(amp=-0.38, attack=0.35, decay=0.8, freq=1.2, root_push=0.02, crouch=0.07, all_groups=False),
    "explosion":   dict(amp=0.50, attack=0.07, decay=1.5, freq=1.6, root_push=0.09, crouch=0.00, all_groups=True),
}

# yaw_total: net root yaw over the phase (rad); osc_amp/osc_freq: limb
# oscillation; spike: one-shot pose burst amplitude at mid-phase;
# root_amp: horizontal root zigzag (m); hold: frames per stutter step;
# freeze: hold the entering pose for the whole phase.
GLITCH_QUALITY_PARAMS = {
    "shake":   dict(yaw_total=0.0, osc_amp=0.12, osc_freq=9.0, spike=0.0, root_amp=0.00, hold=0, freeze=False,
                    joints=("left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "neck", "head",
                            "left_knee", "right_knee")),
    "flail":   dict(yaw_total=0.0, osc_amp=0.70, osc_freq=2.5, spike=0.0, root_amp=0.00, hold=0, freeze=False,
                    joints=("left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
                            "left_hip", "right_hip", "left_knee", "right_knee")),
    "flash":   dict(yaw_total=0.0, osc_amp=0.06, osc_freq=1.0, spike=0.90, root_amp=0.00, hold=0, freeze=False,
                    joints=("left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "neck", "head")),
    "stutter": dict(yaw_total=0.0, osc_amp=0.45, osc_freq=1.8, spike=0.0, root_amp=0.00, hold=4, freeze=False,
                    joints=("left_shoulder", "right_shoulder", "left_hip", "right_hip",
                            "left_knee", "right_knee")),
    "contort": dict(yaw_total=0.0, osc_amp=0.80, osc_freq=0.8, spike=0.0, root_amp=0.00, hold=0, freeze=False,
                    joints=("spine1", "spine2", "spine3", "neck", "head")),
    "stumble": dict(yaw_total=0.15, osc_amp=0.40, osc_freq=2.2, spike=0.0, root_amp=0.16, hold=0, freeze=False,
                    joints=("left_hip", "right_hip", "left_knee", "right_knee", "left_ankle", "right_ankle")),
    "spin":    dict(yaw_total=np.deg2rad(150.0), osc_amp=0.10, osc_freq=1.0, spike=0.0, root_amp=0.00, hold=0,
                    freeze=False, joints=("left_shoulder", "right_shoulder")),
    "freeze":  dict(yaw_total=0.0, osc_amp=0.0, osc_freq=0.0, spike=0.0, root_amp=0.00, hold=0, freeze=True,
                    joints=()),
}

# profile: exponent-style descent curve name; pitch: final root pitch (rad);
# travel: horizontal travel while falling (m); rigid_spine: spine channels
# held exactly at their phase-entry values; targets: floor-pose joint angles.
FALL_QUALITY_PARAMS = {
    "release":   dict(profile="smoothstep", pitch=1.35, travel=0.30, rigid_spine=False,
                      targets=dict(knee=0.30, hip=0.25, shoulder=0.40, elbow=0.30, spine=0.15)),
    "let_go":    dict(profile="fast_early", pitch=1.40, travel=0.35, rigid_spine=False,
                      targets=dict(knee=0.45, hip=0.35, shoulder=-0.20, elbow=0.10, spine=0.10)),
    "hinge":     dict(profile="accelerate", pitch=1.50, travel=0.40, rigid_spine=True,
                      targets=dict(knee=0.05, hip=0.10, shoulder=0.10, elbow=0.05, spine=0.0)),
    "surrender": dict(profile="yielding", pitch=1.15, travel=0.20, rigid_spine=False,
                      targets=dict(knee=1.10, hip=0.90, shoulder=0.50, elbow=0.45, spine=0.35)),
    "suspend":   dict(profile="late_drop", pitch=1.30, travel=0.25, rigid_spine=False,
                      targets=dict(knee=0.20, hip=0.15, shoulder=0.70, elbow=0.20, spine=0.05)),
}

_DESCENT_PROFILES = {
    "smoothstep": lambda u: u * u * (3.0 - 2.0 * u),
    "fast_early": lambda u: 1.0 - (1.0 - u) ** 2,
    "accelerate": lambda u: u ** 2,
    "yielding": lambda u: u ** 1.5,
    "late_drop": lambda u: u ** 4,
}

_TARGET_GROUPS = {
    "knee": ("left_knee", "right_knee"),
    "hip": ("left_hip", "right_hip"),
    "shoulder": ("left_shoulder", "right_shoulder"),
    "elbow": ("left_elbow", "right_elbow"),
    "spine": ("spine1", "spine2", "spine3"),
}

_SPINE_JOINTS = ("spine1", "spine2", "spine3")


def _joint_indices(skeleton: Skeleton, names) -> list[int]:
    return [skeleton.joint_names.index(n) for n in names]


def _impact_envelope(t01: np.ndarray, attack: float, decay: float) -> np.ndarray:
    """Linear rise to 1 over the attack fraction, exponential falloff after."""
    rise = np.clip(t01 / max(attack, 1e-6), 0.0, 1.0)
    fall = np.exp(-decay * np.clip((t01 - attack) / max(1.0 - attack, 1e-6), 0.0, None))
    return rise * fall


def synthesize_fall(attrs: AttributeConfig, durations: tuple[int, int, int] = DEFAULT_DURATIONS,
                    fps: float = 24.0, rng_seed: int = 0, preset: str = "male") -> MotionSequence:
    """Generate one deterministic falling trial shaped by ``attrs``.

    ``durations`` are per-phase frame counts (impact, glitch, fall), each at
    least 4.  Same arguments always give a bit-identical sequence.
    """
    d_impact, d_glitch, d_fall = (int(d) for d in durations)
    if min(d_impact, d_glitch, d_fall) < MIN_PHASE_FRAMES:
        raise DurationTooShort(
            f"each phase needs >= {MIN_PHASE_FRAMES} frames, got {durations}")
    skeleton = load_skeleton(preset)
    m = d_impact
    n = m + d_glitch
    k = n + d_fall
    rng = np.random.default_rng(rng_seed)
    names = skeleton.joint_names

    yaw = np.zeros(k)
    pitch = np.zeros(k)
    roll = np.zeros(k)
    root_pos = np.zeros((k, 3))
    root_pos[:, 1] = skeleton.standing_root_height()
    ang = np.zeros((k, skeleton.num_joints, 3))  # per-joint XYZ Euler angles

    scale = 1.0 + 0.15 * (rng.uniform() * 2.0 - 1.0)  # per-trial intensity

    # Impact: localized oscillation with a quality-specific envelope, decaying
    # on into the glitch phase so the boundary stays continuous.
    ip = IMPACT_QUALITY_PARAMS[attrs.impact_quality]
    t01 = np.arange(m) / m
    env = np.zeros(n)
    env[:m] = _impact_envelope(t01, ip["attack"], ip["decay"])
    env[m:] = env[m - 1] * np.exp(-6.0 * np.arange(1, n - m + 1) / (n - m))
    t_sec = np.arange(n) / fps
    groups = list(IMPACT_LOCATION_JOINTS) if ip["all_groups"] else [attrs.impact_location]
    for group in groups:
        weight = 1.0 if group == attrs.impact_location else 0.6
        for j in _joint_indices(skeleton, IMPACT_LOCATION_JOINTS[group]):
            for axis in range(3):
                phase_off = rng.uniform(0.0, 2.0 * np.pi)
                axis_gain = rng.uniform(0.4, 1.0)
                ang[:n, j, axis] += (scale * weight * axis_gain * ip["amp"] * env
                                     * np.sin(2.0 * np.pi * ip["freq"] * t_sec + phase_off))
    push_curve = np.zeros(n)
    push_curve[:m] = t01 * t01 * (3.0 - 2.0 * t01)
    push_curve[m:] = 1.0
    root_pos[:n, 2] -= scale * ip["root_push"] * push_curve
    if ip["crouch"] > 0.0:
        root_pos[:m, 1] -= ip["crouch"] * np.sin(np.pi * t01)

    # Glitch: additive style curves over [m, n).
    gp = GLITCH_QUALITY_PARAMS[attrs.glitch_quality]
    u = np.arange(n - m) / (n - m - 1)
    ramp = np.minimum(np.arange(n - m) / 2.0, 1.0)  # 2-frame fade-in at the boundary
    yaw[m:n] = gp["yaw_total"] * (u * u * (3.0 - 2.0 * u))
    yaw[n:] = yaw[n - 1]
    t_g = np.arange(n - m) / fps
    for j in _joint_indices(skeleton, gp["joints"]):
        for axis in range(3):
            phase_off = rng.uniform(0.0, 2.0 * np.pi)
            axis_gain = rng.uniform(0.4, 1.0)
            ang[m:n, j, axis] += (scale * axis_gain * gp["osc_amp"] * ramp
                                  * np.sin(2.0 * np.pi * gp["osc_freq"] * t_g + phase_off))
    if gp["root_amp"] > 0.0:
        root_pos[m:n, 0] += scale * gp["root_amp"] * ramp * np.sin(2.0 * np.pi * 2.2 * u)
        root_pos[m:n, 2] += scale * 0.5 * gp["root_amp"] * ramp * np.sin(2.0 * np.pi * 1.3 * u + 1.0)
    if gp["spike"] > 0.0:
        mid = m + (n - m) // 2
        for j in _joint_indices(skeleton, gp["joints"]):
            ang[mid, j, 0] += gp["spike"]
            ang[mid, j, 2] += 0.5 * gp["spike"]
        roll[mid] += 0.25

    # Gentle idle sway on the spine so no channel is ever perfectly flat.
    sway_phase = rng.uniform(0.0, 2.0 * np.pi)
    sway = 0.015 * np.sin(2.0 * np.pi * 0.4 * np.arange(n) / fps + sway_phase)
    for j in _joint_indices(skeleton, ("spine1", "spine2")):
        ang[:n, j, 2] += sway

    if gp["freeze"]:
        yaw[m:n] = yaw[m - 1]
        pitch[m:n] = pitch[m - 1]
        roll[m:n] = roll[m - 1]
        root_pos[m:n] = root_pos[m - 1]
        ang[m:n] = ang[m - 1]
        yaw[n:] = yaw[n - 1]
    elif gp["hold"] > 0:
        hold = gp["hold"]
        idx = m + (np.arange(n - m) // hold) * hold
        yaw[m:n] = yaw[idx]
        pitch[m:n] = pitch[idx]
        roll[m:n] = roll[idx]
        root_pos[m:n] = root_pos[idx]
        ang[m:n] = ang[idx]
        yaw[n:] = yaw[n - 1]

    # Fall: blend every channel from the last glitch frame toward a
    # style-specific floor pose, so the phase boundary is continuous by
    # construction.
    fp = FALL_QUALITY_PARAMS[attrs.fall_quality]
    profile = _DESCENT_PROFILES[fp["profile"]](np.arange(1, k - n + 1) / (k - n))
    h_end = FLOOR_ROOT_HEIGHT + 0.03 * rng.uniform()
    root_pos[n:, 1] = root_pos[n - 1, 1] + (h_end - root_pos[n - 1, 1]) * profile
    forward = yaw_matrix(yaw[n - 1]) @ np.array([0.0, 0.0, -1.0])
    root_pos[n:, 0] = root_pos[n - 1, 0] + fp["travel"] * profile * forward[0]
    root_pos[n:, 2] = root_pos[n - 1, 2] + fp["travel"] * profile * forward[2]
    pitch[n:] = pitch[n - 1] + (fp["pitch"] - pitch[n - 1]) * profile
    roll[n:] = roll[n - 1] * (1.0 - profile)

    target = np.zeros((skeleton.num_joints, 3))
    for key, joint_names in _TARGET_GROUPS.items():
        for j in _joint_indices(skeleton, joint_names):
            sign = -1.0 if names[j].startswith("right") else 1.0
            target[j, 0] = fp["targets"][key] * (1.0 + 0.1 * (rng.uniform() * 2.0 - 1.0))
            target[j, 2] = 0.3 * fp["targets"][key] * sign
    ang[n:] = ang[n - 1] + (target - ang[n - 1]) * profile[:, None, None]
    if fp["rigid_spine"]:
        for j in _joint_indices(skeleton, _SPINE_JOINTS):
            ang[n:, j] = ang[n - 1, j]

    root_rot = rotation_y(yaw) @ rotation_x(pitch) @ rotation_z(roll)
    flat = ang.reshape(-1, 3)
    joint_rot = rotation_x(flat[:, 0]) @ rotation_y(flat[:, 1]) @ rotation_z(flat[:, 2])
    joint_rot6d = matrix_to_rot6d(joint_rot.reshape(k, skeleton.num_joints, 3, 3))

    frames = np.empty((k, POSE_DIM))
    frames[:, 0:3] = root_pos
    frames[:, 3:9] = matrix_to_rot6d(root_rot)
    frames[:, 9:] = joint_rot6d.reshape(k, -1)
    seq = MotionSequence(fps=float(fps), frames=frames, impact_end=m, glitch_end=n,
                         attributes=attrs)
    return normalize_origin(seq)


def grid_attributes(index: int) -> AttributeConfig:
    """Deterministic walk over the attribute grid; 40 consecutive indices
    cover every impact class twice and every glitch/fall value at least 4
    times, which keeps small datasets classifier-friendly."""
    from .attributes import FALL_QUALITIES, GLITCH_QUALITIES, IMPACT_LOCATIONS, IMPACT_QUALITIES

    return AttributeConfig(
        impact_location=IMPACT_LOCATIONS[index % 4],
        impact_quality=IMPACT_QUALITIES[(index // 4) % 5],
        glitch_quality=GLITCH_QUALITIES[index % 8],
        fall_quality=FALL_QUALITIES[index % 5],
    )


def synthesize_dataset(count: int, master_seed: int = 0,
                       durations: tuple[int, int, int] = DEFAULT_DURATIONS,
                       fps: float = 24.0, preset: str = "male",
                       balanced: bool = True) -> list[MotionSequence]:
    """Generate ``count`` trials with per-sample seeds derived from one master
    seed, so results do not depend on generation order.  ``balanced`` walks
    the attribute grid; otherwise attributes are drawn uniformly."""
    sequences = []
    seed_rng = np.random.default_rng(master_seed)
    seeds = seed_rng.integers(0, 2 ** 31 - 1, size=2 * count)
    for i in range(count):
        if balanced:
            attrs = grid_attributes(i)
        else:
            attrs = AttributeConfig.random(np.random.default_rng(int(seeds[2 * i])))
        sequences.append(synthesize_fall(attrs, durations, fps, int(seeds[2 * i + 1]), preset))
    return sequences
