import { ApiClient, ApiError } from "./api";
import { downloadJson } from "./download";
import { fkFrames } from "./fk";
import { buildAttributePanel } from "./panel";
import { SkeletonScene } from "./scene";
import { ViewerState } from "./state";
import { buildTimeline } from "./timeline";
import "./style.css";

// The service ships exactly these two rigs; there is no listing endpoint.
const BODY_MODELS = ["male", "female"];

const api = new ApiClient("");
const state = new ViewerState(api);

const canvas = document.getElementById("viewport") as HTMLCanvasElement;
const sidebar = document.getElementById("sidebar") as HTMLElement;
const footer = document.getElementById("footer") as HTMLElement;
const statusLine = document.getElementById("status") as HTMLElement;
const metaLine = document.getElementById("metadata") as HTMLElement;

const scene = new SkeletonScene(canvas);

function showError(err: unknown): void {
  const text =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  statusLine.textContent = text;
  statusLine.classList.add("error");
}

function showStatus(text: string): void {
  statusLine.textContent = text;
  statusLine.classList.remove("error");
}

function refreshPose(): void {
  const positions = state.currentPositions();
  const skeleton = state.skeleton;
  if (positions && skeleton) scene.setPose(positions, skeleton);
}

async function boot(): Promise<void> {
  showStatus("loading vocabularies...");
  await state.init();
  scene.setSkeleton(state.skeleton!);

  const panel = buildAttributePanel(document, state.attributes!, (field, value) =>
    state.select(field, value),
  );
  sidebar.appendChild(panel.root);

  // Body model toggle: re-skins the loaded sequence, no regeneration.
  const modelRow = document.createElement("div");
  modelRow.className = "model-row";
  for (const model of BODY_MODELS) {
    const button = document.createElement("button");
    button.textContent = model;
    button.className = model === state.bodyModel ? "active" : "";
    button.addEventListener("click", async () => {
      try {
        await state.setBodyModel(model);
        for (const sibling of Array.from(modelRow.children)) {
          sibling.className = sibling === button ? "active" : "";
        }
        scene.setSkeleton(state.skeleton!);
        refreshPose();
        showStatus(`body model: ${model}`);
      } catch (err) {
        showError(err);
      }
    });
    modelRow.appendChild(button);
  }
  sidebar.appendChild(modelRow);

  const durationsInput = document.createElement("input");
  durationsInput.placeholder = "durations M,G,F (blank = default)";
  const seedInput = document.createElement("input");
  seedInput.placeholder = "seed (blank = random)";
  sidebar.append(durationsInput, seedInput);

  const generateButton = document.createElement("button");
  generateButton.textContent = "generate";
  generateButton.className = "primary";

  const downloadButton = document.createElement("button");
  downloadButton.textContent = "download JSON";
  downloadButton.disabled = true;

  const fkCheckButton = document.createElement("button");
  fkCheckButton.textContent = "verify FK against service";
  fkCheckButton.disabled = true;

  sidebar.append(generateButton, downloadButton, fkCheckButton);

  const timeline = buildTimeline(
    document,
    (frame) => {
      state.setFrame(frame);
      timeline.setFrame(state.frame);
      refreshPose();
    },
    () => {
      /* play flag read in the animation loop */
    },
  );
  footer.appendChild(timeline.root);

  generateButton.addEventListener("click", async () => {
    try {
      state.durations = parseDurations(durationsInput.value);
      state.seed = seedInput.value.trim() === "" ? null : Number(seedInput.value);
      generateButton.disabled = true;
      showStatus("generating...");
      const response = await state.generate();
      timeline.setSequence(response.sequence);
      refreshPose();
      downloadButton.disabled = false;
      fkCheckButton.disabled = false;
      const meta = response.metadata;
      metaLine.textContent =
        `seed ${meta.seed} | checkpoint ${meta.checkpoint_id} | ${meta.wall_time_ms.toFixed(1)} ms`;
      showStatus(`${response.sequence.frames.length} frames`);
    } catch (err) {
      showError(err);
    } finally {
      generateButton.disabled = false;
    }
  });

  downloadButton.addEventListener("click", () => {
    const doc = state.exportDocument();
    if (!doc) return;
    const attrs = Object.values(state.sequence!.attributes).join("_");
    downloadJson(document, doc, `fall_${attrs}_seed${state.metadata!.seed}.json`);
  });

  fkCheckButton.addEventListener("click", async () => {
    if (!state.sequence || !state.skeleton) return;
    try {
      const server = await api.fk(state.bodyModel, state.sequence.frames);
      const local = fkFrames(state.skeleton, state.sequence.frames);
      let worst = 0;
      server.positions.forEach((frame, t) =>
        frame.forEach((joint, j) =>
          joint.forEach((value, axis) => {
            worst = Math.max(worst, Math.abs(value - local[t][j][axis]));
          }),
        ),
      );
      showStatus(`FK max deviation vs service: ${worst.toExponential(2)}`);
    } catch (err) {
      showError(err);
    }
  });

  // Playback loop.
  let previous = performance.now();
  let cursor = 0;
  function tick(now: number): void {
    const dt = (now - previous) / 1000;
    previous = now;
    if (timeline.playing && state.sequence) {
      cursor += dt * state.sequence.fps;
      const count = state.frameCount();
      if (cursor >= count) cursor -= count;
      const frame = Math.floor(cursor);
      if (frame !== state.frame) {
        state.setFrame(frame);
        timeline.setFrame(state.frame);
        refreshPose();
      }
    } else {
      cursor = state.frame;
    }
    scene.render();
    requestAnimationFrame(tick);
  }
  requestAnimationFrame(tick);

  showStatus("ready");
}

function parseDurations(text: string): [number, number, number] | null {
  const trimmed = text.trim();
  if (!trimmed) return null;
  const parts = trimmed.split(",").map((p) => Number(p.trim()));
  if (parts.length !== 3 || parts.some((p) => !Number.isFinite(p))) {
    throw new Error("durations must be three comma-separated frame counts");
  }
  return [parts[0], parts[1], parts[2]];
}

boot().catch(showError);
