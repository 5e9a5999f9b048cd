// Viewer state against the live service: scrubbing, body-model re-skin, and
// the client FK agreeing with the service FK.

import { beforeAll, expect, test } from "vitest";
import { ApiClient, type FetchLike } from "../src/api";
import { fkFrames } from "../src/fk";
import { ViewerState } from "../src/state";
import { SERVICE_URL, httpFetch } from "./service";

const calls = { attributes: 0, skeleton: 0, generate: 0, fk: 0 };

const countingFetch: FetchLike = (url, init) => {
  if (url.includes("/api/v1/attributes")) calls.attributes += 1;
  if (url.includes("/api/v1/skeleton")) calls.skeleton += 1;
  if (url.includes("/api/v1/generate")) calls.generate += 1;
  if (url.includes("/api/v1/fk")) calls.fk += 1;
  return httpFetch(url, init);
};

const state = new ViewerState(new ApiClient(SERVICE_URL, countingFetch));

beforeAll(async () => {
  await state.init();
  state.durations = [6, 8, 10];
  state.seed = 5;
  await state.generate();
});

test("scrubbing back to frame 0 puts the root at the horizontal origin", () => {
  expect(state.frameCount()).toBe(24);
  state.setFrame(17);
  expect(state.frame).toBe(17);
  state.setFrame(0);

  const positions = state.currentPositions()!;
  const root = positions[state.skeleton!.rootIndex];
  expect(Math.abs(root[0])).toBeLessThan(1e-12);
  expect(Math.abs(root[2])).toBeLessThan(1e-12);
  expect(Number.isFinite(root[1])).toBe(true); // height is untouched by the origin shift

  // The root joint is the pose's root translation verbatim.
  expect(root).toEqual(state.sequence!.frames[0].root_pos);
});

test("phase boundaries drive the phase readout", () => {
  expect(state.sequence!.boundaries).toEqual({ impact_end: 6, glitch_end: 14 });
  expect(state.phaseOf(0)).toBe("impact");
  expect(state.phaseOf(6)).toBe("glitch");
  expect(state.phaseOf(13)).toBe("glitch");
  expect(state.phaseOf(14)).toBe("fall");
  expect(state.phaseOf(23)).toBe("fall");
});

test("switching body model re-skins without regenerating", async () => {
  const sequenceBefore = state.sequence;
  const generateCalls = calls.generate;
  const malePositions = state.positionsAt(0)!;

  await state.setBodyModel("female");

  expect(calls.generate).toBe(generateCalls); // no new generation
  expect(state.sequence).toBe(sequenceBefore); // same sequence object
  const femalePositions = state.positionsAt(0)!;

  // Same pose, different bone lengths: the root agrees, limbs move.
  const root = state.skeleton!.rootIndex;
  expect(femalePositions[root]).toEqual(malePositions[root]);
  let worst = 0;
  femalePositions.forEach((joint, j) =>
    joint.forEach((value, axis) => {
      worst = Math.max(worst, Math.abs(value - malePositions[j][axis]));
    }),
  );
  expect(worst).toBeGreaterThan(1e-3);
});

test("skeletons are cached per body model", async () => {
  const skeletonCalls = calls.skeleton;
  await state.setBodyModel("male");
  await state.setBodyModel("female");
  expect(calls.skeleton).toBe(skeletonCalls); // both already cached
});

test("client FK matches the service FK endpoint", async () => {
  await state.setBodyModel("male");
  const api = new ApiClient(SERVICE_URL, httpFetch);
  const server = await api.fk("male", state.sequence!.frames);
  const local = fkFrames(state.skeleton!, state.sequence!.frames);

  let worst = 0;
  server.positions.forEach((frame, t) =>
    frame.forEach((joint, j) =>
      joint.forEach((value, axis) => {
        worst = Math.max(worst, Math.abs(value - local[t][j][axis]));
      }),
    ),
  );
  expect(worst).toBeLessThan(1e-4);
});

test("export document carries the sequence, metadata and body model", () => {
  const doc = state.exportDocument()!;
  expect(doc.sequence).toBe(state.sequence);
  expect((doc.metadata as { seed: number }).seed).toBe(5);
  expect(doc.body_model).toBe("male");
});
