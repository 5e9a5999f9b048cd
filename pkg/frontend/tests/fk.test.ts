// Client-side FK against frozen reference fixtures (regenerate with
// scripts/make_fixtures.py). Tolerance 1e-4; observed agreement is ~1e-13,
// limited only by operation order.

import { describe, expect, test } from "vitest";
import { buildSkeleton, flattenFrame, forwardKinematics, rot6dToMatrix } from "../src/fk";
import fixtures from "./fixtures/fk_cases.json";

const TOLERANCE = 1e-4;

type SkeletonDoc = {
  joint_names: string[];
  parent_index: number[];
  bone_offsets: number[][];
};

const skeletons = fixtures.skeletons as Record<string, SkeletonDoc>;

describe("forward kinematics vs reference fixtures", () => {
  for (const fkCase of fixtures.cases) {
    test(fkCase.name, () => {
      const skeleton = buildSkeleton(skeletons[fkCase.model]);
      let worst = 0;
      fkCase.frames.forEach((pose, t) => {
        const positions = forwardKinematics(skeleton, pose);
        const expected = fkCase.expected[t];
        positions.forEach((joint, j) =>
          joint.forEach((value, axis) => {
            worst = Math.max(worst, Math.abs(value - expected[j][axis]));
          }),
        );
      });
      expect(worst).toBeLessThan(TOLERANCE);
    });
  }
});

describe("rotation and pose plumbing", () => {
  test("identity 6D maps to the identity matrix", () => {
    const m = rot6dToMatrix([1, 0, 0, 0, 1, 0]);
    expect(Array.from(m)).toEqual([1, 0, 0, 0, 1, 0, 0, 0, 1]);
  });

  test("Gram-Schmidt output columns are orthonormal", () => {
    const m = rot6dToMatrix([0.3, -1.2, 0.4, 2.0, 0.5, -0.7]);
    for (let a = 0; a < 3; a++) {
      for (let b = 0; b < 3; b++) {
        const dot = m[a] * m[b] + m[3 + a] * m[3 + b] + m[6 + a] * m[6 + b];
        expect(Math.abs(dot - (a === b ? 1 : 0))).toBeLessThan(1e-12);
      }
    }
  });

  test("flattenFrame reproduces the flat pose layout", () => {
    const flat = fixtures.cases[0].frames[0];
    const structured = {
      root_pos: flat.slice(0, 3),
      root_rot6d: flat.slice(3, 9),
      joint_rot6d: Array.from({ length: 24 }, (_, j) =>
        flat.slice(9 + 6 * j, 9 + 6 * (j + 1)),
      ),
    };
    expect(flattenFrame(structured)).toEqual(flat);
  });
});
