// Client-side forward kinematics, mirroring the service's math in float64.
//
// Pose layout per frame: root position (3), root rotation (6D), then one 6D
// rotation per joint. A 6D rotation is the first two matrix columns,
// unnormalized; Gram-Schmidt restores orthonormality and the third column is
// the cross product. Y is up.

import type { FrameDoc, SkeletonPayload } from "./api";

// Row-major 3x3: m[3 * row + col].
export type Mat3 = Float64Array;

const DEGENERACY_EPS = 1e-8;

export class DegenerateRotation extends Error {}

export function rot6dToMatrix(r: ArrayLike<number>, offset = 0): Mat3 {
  const ax = r[offset], ay = r[offset + 1], az = r[offset + 2];
  const bx = r[offset + 3], by = r[offset + 4], bz = r[offset + 5];
  const na = Math.sqrt(ax * ax + ay * ay + az * az);
  if (!(na > DEGENERACY_EPS)) throw new DegenerateRotation("first column norm below threshold");
  const xx = ax / na, xy = ay / na, xz = az / na;
  const dot = xx * bx + xy * by + xz * bz;
  let yx = bx - dot * xx, yy = by - dot * xy, yz = bz - dot * xz;
  const ny = Math.sqrt(yx * yx + yy * yy + yz * yz);
  if (!(ny > DEGENERACY_EPS)) throw new DegenerateRotation("second column collinear with the first");
  yx /= ny; yy /= ny; yz /= ny;
  const zx = xy * yz - xz * yy;
  const zy = xz * yx - xx * yz;
  const zz = xx * yy - xy * yx;
  // Columns are x, y, z.
  return Float64Array.of(xx, yx, zx, xy, yy, zy, xz, yz, zz);
}

function matMul(a: Mat3, b: Mat3): Mat3 {
  const out = new Float64Array(9);
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      out[3 * i + j] =
        a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
    }
  }
  return out;
}

function matVec(m: Mat3, v: ArrayLike<number>): [number, number, number] {
  return [
    m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
    m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
    m[6] * v[0] + m[7] * v[1] + m[8] * v[2],
  ];
}

export interface SkeletonDef {
  jointNames: string[];
  parentIndex: number[];
  boneOffsets: number[][];
  rootIndex: number;
  order: number[]; // parents before children
}

export function buildSkeleton(payload: Pick<SkeletonPayload, "joint_names" | "parent_index" | "bone_offsets">): SkeletonDef {
  const parentIndex = payload.parent_index;
  const n = parentIndex.length;
  const rootIndex = parentIndex.indexOf(-1);
  if (rootIndex < 0) throw new Error("skeleton has no root joint");
  const order: number[] = [];
  const placed = new Set<number>();
  let pending = Array.from({ length: n }, (_, j) => j);
  while (pending.length) {
    const remaining: number[] = [];
    for (const j of pending) {
      const p = parentIndex[j];
      if (p < 0 || placed.has(p)) {
        order.push(j);
        placed.add(j);
      } else {
        remaining.push(j);
      }
    }
    if (remaining.length === pending.length) throw new Error("skeleton parent links contain a cycle");
    pending = remaining;
  }
  return {
    jointNames: payload.joint_names,
    parentIndex,
    boneOffsets: payload.bone_offsets,
    rootIndex,
    order,
  };
}

export function flattenFrame(frame: FrameDoc): number[] {
  const row = [...frame.root_pos, ...frame.root_rot6d];
  for (const joint of frame.joint_rot6d) row.push(...joint);
  return row;
}

export function poseDim(skeleton: SkeletonDef): number {
  return 9 + 6 * skeleton.jointNames.length;
}

// World joint positions ([J][3]) for one flat pose row.
export function forwardKinematics(skeleton: SkeletonDef, pose: ArrayLike<number>): number[][] {
  const j = skeleton.jointNames.length;
  if (pose.length !== 9 + 6 * j) {
    throw new Error(`pose vector length ${pose.length} does not match skeleton (${9 + 6 * j})`);
  }
  const body = rot6dToMatrix(pose, 3);
  const positions: number[][] = new Array(j);
  const rotations: Mat3[] = new Array(j);
  for (const idx of skeleton.order) {
    const local = rot6dToMatrix(pose, 9 + 6 * idx);
    const p = skeleton.parentIndex[idx];
    if (p < 0) {
      positions[idx] = [pose[0], pose[1], pose[2]];
      rotations[idx] = matMul(body, local);
    } else {
      const step = matVec(rotations[p], skeleton.boneOffsets[idx]);
      const base = positions[p];
      positions[idx] = [base[0] + step[0], base[1] + step[1], base[2] + step[2]];
      rotations[idx] = matMul(rotations[p], local);
    }
  }
  return positions;
}

export function fkFrames(skeleton: SkeletonDef, frames: FrameDoc[]): number[][][] {
  return frames.map((f) => forwardKinematics(skeleton, flattenFrame(f)));
}
