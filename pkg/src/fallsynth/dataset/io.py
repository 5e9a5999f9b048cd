"""On-disk sequence format and dataset directory layout.

A trial is one JSON document (schema below); a dataset directory holds one
file per trial plus ``manifest.json`` listing the split membership.

Sequence schema (schema_version 1)::

    {
      "schema_version": 1,
      "fps": <number>,
      "attributes": {"impact_location", "impact_quality", "glitch_quality", "fall_quality"},
      "boundaries": {"impact_end": M, "glitch_end": N},
      "frames": [{"root_pos": [3], "root_rot6d": [6], "joint_rot6d": [[6] x 24]}, ...]
    }

Floats are serialized with Python's shortest round-tripping repr, so a
save -> load round trip is bit-exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..kinematics.pose import POSE_DIM
from ..kinematics.skeleton import NUM_BODY_JOINTS
from .attributes import AttributeConfig, UnknownLabel
from .sequence import InvalidSequence, MotionSequence

SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.json"


class ParseError(ValueError):
    """Malformed sequence document; the message names the offending field."""


class SchemaVersionMismatch(ParseError):
    """Document was written with an unsupported schema version."""


def sequence_to_dict(seq: MotionSequence) -> dict:
    """Serialize to the documented schema (plain Python types only)."""
    frames = []
    for row in seq.frames:
        frames.append(
            {
                "root_pos": row[0:3].tolist(),
                "root_rot6d": row[3:9].tolist(),
                "joint_rot6d": row[9:].reshape(NUM_BODY_JOINTS, 6).tolist(),
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "fps": float(seq.fps),
        "attributes": seq.attributes.as_dict(),
        "boundaries": {"impact_end": seq.impact_end, "glitch_end": seq.glitch_end},
        "frames": frames,
    }


def _require(mapping: dict, key: str, context: str):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ParseError(f"missing field {context}.{key}" if context else f"missing field {key}")
    return mapping[key]


def sequence_from_dict(doc: dict) -> MotionSequence:
    """Parse and validate a sequence document."""
    version = _require(doc, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"schema_version {version!r} is not supported (expected {SCHEMA_VERSION})")
    fps = _require(doc, "fps", "")
    attrs_doc = _require(doc, "attributes", "")
    try:
        attributes = AttributeConfig.from_dict(attrs_doc)
    except KeyError as exc:
        raise ParseError(f"missing field attributes.{exc.args[0]}") from exc
    except UnknownLabel as exc:
        raise ParseError(str(exc)) from exc
    bounds = _require(doc, "boundaries", "")
    impact_end = _require(bounds, "impact_end", "boundaries")
    glitch_end = _require(bounds, "glitch_end", "boundaries")
    frames_doc = _require(doc, "frames", "")
    if not isinstance(frames_doc, list) or not frames_doc:
        raise ParseError("field frames must be a non-empty list")

    frames = np.empty((len(frames_doc), POSE_DIM))
    for i, frame in enumerate(frames_doc):
        root_pos = _require(frame, "root_pos", f"frames[{i}]")
        root_rot = _require(frame, "root_rot6d", f"frames[{i}]")
        joints = _require(frame, "joint_rot6d", f"frames[{i}]")
        try:
            frames[i, 0:3] = np.asarray(root_pos, dtype=np.float64).reshape(3)
            frames[i, 3:9] = np.asarray(root_rot, dtype=np.float64).reshape(6)
            frames[i, 9:] = np.asarray(joints, dtype=np.float64).reshape(NUM_BODY_JOINTS * 6)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"frames[{i}] has malformed pose data: {exc}") from exc

    try:
        return MotionSequence(
            fps=float(fps),
            frames=frames,
            impact_end=int(impact_end),
            glitch_end=int(glitch_end),
            attributes=attributes,
        )
    except InvalidSequence as exc:
        raise ParseError(f"invalid sequence: {exc}") from exc


def save_sequence(seq: MotionSequence, path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(sequence_to_dict(seq), fh)
        fh.write("\n")


def load_sequence(path: str | Path) -> MotionSequence:
    path = Path(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path.name}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return sequence_from_dict(doc)


def split_names(names: list[str], fractions: dict[str, float], seed: int) -> dict[str, list[str]]:
    """Disjoint, deterministic splits of trial names given a split seed."""
    order = list(names)
    rng = np.random.default_rng(seed)
    rng.shuffle(order)
    splits: dict[str, list[str]] = {}
    start = 0
    items = list(fractions.items())
    for i, (split, frac) in enumerate(items):
        count = len(order) - start if i == len(items) - 1 else int(round(frac * len(order)))
        splits[split] = sorted(order[start : start + count])
        start += count
    return splits


def write_manifest(directory: str | Path, splits: dict[str, list[str]], seed: int):
    doc = {"schema_version": SCHEMA_VERSION, "seed": seed, "splits": splits}
    with open(Path(directory) / MANIFEST_NAME, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(directory: str | Path) -> dict:
    path = Path(directory) / MANIFEST_NAME
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"dataset directory {directory} has no {MANIFEST_NAME}") from None
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"manifest schema_version {doc.get('schema_version')!r} is not supported")
    return doc


def load_dataset(directory: str | Path, split: str | None = None) -> list[MotionSequence]:
    """Load all trials in a split (or every listed trial when split is None)."""
    directory = Path(directory)
    manifest = load_manifest(directory)
    if split is None:
        names = sorted(name for names in manifest["splits"].values() for name in names)
    else:
        if split not in manifest["splits"]:
            raise KeyError(f"manifest has no split {split!r}; available: {sorted(manifest['splits'])}")
        names = manifest["splits"][split]
    return [load_sequence(directory / name) for name in names]
