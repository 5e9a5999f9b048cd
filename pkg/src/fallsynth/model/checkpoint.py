"""Bit-reproducible checkpoint container.

Layout (all little-endian):

    bytes 0..7    magic b"FSCK0001"
    bytes 8..15   uint64 header length H
    next H bytes  UTF-8 JSON, keys sorted: {"version", "config", "step",
                  "rng_state", "params": [{"name", "shape"}...],
                  "payload_sha256"}
    remainder     each parameter's float64 buffer, C order, concatenated in
                  the header's listed order

A zip-based format embeds timestamps and breaks byte-for-byte equality of
identical training runs; this one is a pure function of its contents.
"""
from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .config import ModelConfig

MAGIC = b"FSCK0001"
CHECKPOINT_VERSION = 1


class CorruptCheckpoint(ValueError):
    pass


def save_checkpoint(path, config: dict, params: dict[str, np.ndarray],
                    step: int = 0, rng_state: dict | None = None):
    """Write a config dict + named arrays; identical inputs give identical
    bytes.  ``config`` should carry a "kind" key naming the model family."""
    names = sorted(params)
    payload = b"".join(np.ascontiguousarray(params[n], dtype="<f8").tobytes() for n in names)
    header = {
        "version": CHECKPOINT_VERSION,
        "config": config,
        "step": int(step),
        "rng_state": rng_state,
        "params": [{"name": n, "shape": list(params[n].shape)} for n in names],
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(blob)))
        f.write(blob)
        f.write(payload)


def load_checkpoint(path):
    """-> (config dict, {name: array}, step, rng_state)."""
    raw = Path(path).read_bytes()
    if len(raw) < 16 or raw[:8] != MAGIC:
        raise CorruptCheckpoint(f"{path}: not a checkpoint file (bad magic)")
    (header_len,) = struct.unpack("<Q", raw[8:16])
    if 16 + header_len > len(raw):
        raise CorruptCheckpoint(f"{path}: truncated header")
    try:
        header = json.loads(raw[16:16 + header_len].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptCheckpoint(f"{path}: unreadable header: {exc}") from exc
    if header.get("version") != CHECKPOINT_VERSION:
        raise CorruptCheckpoint(
            f"{path}: version {header.get('version')} != {CHECKPOINT_VERSION}")
    payload = raw[16 + header_len:]
    if hashlib.sha256(payload).hexdigest() != header["payload_sha256"]:
        raise CorruptCheckpoint(f"{path}: payload checksum mismatch")
    params = {}
    offset = 0
    for entry in header["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        width = count * 8
        if offset + width > len(payload):
            raise CorruptCheckpoint(f"{path}: truncated payload at {entry['name']}")
        params[entry["name"]] = np.frombuffer(
            payload[offset:offset + width], dtype="<f8").reshape(shape).copy()
        offset += width
    return header["config"], params, header["step"], header["rng_state"]


def checkpoint_id(path) -> str:
    """Short content hash identifying a checkpoint file."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def save_model(path, model, step: int = 0, rng_state: dict | None = None):
    """Persist an AttributeCvae with its configuration."""
    config = dict(model.config.as_dict(), kind="cvae", preset=model.skeleton.preset)
    save_checkpoint(path, config, {n: p.data for n, p in model.parameters().items()},
                    step=step, rng_state=rng_state)


def load_model(path):
    """-> (AttributeCvae, step, rng_state); raises CorruptCheckpoint on a
    checkpoint of another kind."""
    from ..kinematics.skeleton import load_skeleton
    from .cvae import AttributeCvae

    config, params, step, rng_state = load_checkpoint(path)
    kind = config.pop("kind", "cvae")
    if kind != "cvae":
        raise CorruptCheckpoint(f"{path}: expected a cvae checkpoint, got {kind!r}")
    preset = config.pop("preset", "male")
    model = AttributeCvae(ModelConfig.from_dict(config), skeleton=load_skeleton(preset))
    model.load_parameters(params)
    return model, step, rng_state
