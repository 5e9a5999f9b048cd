"""Regenerate tests/fixtures/fk_cases.json from the reference implementation.

Each case carries flat 153-float pose rows and the world joint positions the
service-side FK produces for them; the viewer's TypeScript FK must match
within 1e-4. Floats serialize with shortest round-tripping repr, so the
comparison is effectively exact up to operation order.

Run from anywhere: python3 frontend/scripts/make_fixtures.py
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from fallsynth.dataset.attributes import AttributeConfig
from fallsynth.dataset.synthetic import synthesize_fall
from fallsynth.kinematics.fk import forward_kinematics
from fallsynth.kinematics.pose import POSE_DIM, rest_pose
from fallsynth.kinematics.skeleton import load_skeleton, presets_document

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "fk_cases.json"


def case(name: str, model: str, frames: np.ndarray) -> dict:
    frames = np.asarray(frames, dtype=np.float64).reshape(-1, POSE_DIM)
    positions = forward_kinematics(load_skeleton(model), frames)
    return {
        "name": name,
        "model": model,
        "frames": frames.tolist(),
        "expected": positions.tolist(),
    }


def main():
    doc = presets_document()
    skeletons = {
        p: {
            "joint_names": doc["joint_names"],
            "parent_index": doc["parent_index"],
            "bone_offsets": doc["presets"][p]["bone_offsets"],
        }
        for p in sorted(doc["presets"])
    }

    rng = np.random.default_rng(42)
    cases = []

    standing = rest_pose(load_skeleton("male")).to_vector()
    cases.append(case("standing_rest", "male", standing))
    cases.append(case("standing_rest_female", "female", standing))

    # Raw gaussian 6D channels: exercises the Gram-Schmidt path on
    # unnormalized, non-orthogonal columns.
    wild = rng.normal(size=(3, POSE_DIM))
    wild[:, 0:3] = rng.normal(scale=2.0, size=(3, 3))
    cases.append(case("unnormalized_6d", "male", wild))

    seq = synthesize_fall(
        AttributeConfig("torso", "shot", "spin", "hinge"),
        durations=(8, 10, 12), rng_seed=7,
    )
    picks = [0, 7, 8, 17, 29]
    cases.append(case("spin_hinge_trial", "male", seq.frames[picks]))

    seq_f = synthesize_fall(
        AttributeConfig("head", "push", "freeze", "suspend"),
        durations=(6, 6, 8), rng_seed=3, preset="female",
    )
    cases.append(case("freeze_suspend_trial", "female", seq_f.frames[[0, 9, 19]]))

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"skeletons": skeletons, "cases": cases}))
    total = sum(len(c["frames"]) for c in cases)
    print(f"wrote {OUT} ({len(cases)} cases, {total} frames)")


if __name__ == "__main__":
    main()
