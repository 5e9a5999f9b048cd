// Timeline: scrubber with phase-colored track, play/pause, frame readout.

import type { SequenceDoc } from "./api";
import type { Phase } from "./state";

const PHASE_COLORS: Record<Phase, string> = {
  impact: "#b5474d",
  glitch: "#c79a3b",
  fall: "#4878b0",
};

export interface TimelineHandle {
  root: HTMLElement;
  slider: HTMLInputElement;
  playButton: HTMLButtonElement;
  setSequence(seq: SequenceDoc): void;
  setFrame(index: number): void;
  playing: boolean;
}

export function buildTimeline(
  doc: Document,
  onScrub: (frame: number) => void,
  onTogglePlay: (playing: boolean) => void,
): TimelineHandle {
  const root = doc.createElement("div");
  root.className = "timeline";

  const playButton = doc.createElement("button");
  playButton.textContent = "▶";
  playButton.title = "play / pause";

  const slider = doc.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = "0";
  slider.step = "1";
  slider.value = "0";

  const readout = doc.createElement("span");
  readout.className = "frame-readout";
  readout.textContent = "-";

  root.append(playButton, slider, readout);

  const handle: TimelineHandle = {
    root,
    slider,
    playButton,
    playing: false,
    setSequence(seq: SequenceDoc) {
      slider.max = String(seq.frames.length - 1);
      const m = seq.boundaries.impact_end;
      const n = seq.boundaries.glitch_end;
      const k = seq.frames.length;
      // Phase bands under the scrubber.
      const stops = [
        `${PHASE_COLORS.impact} 0%`,
        `${PHASE_COLORS.impact} ${(100 * m) / k}%`,
        `${PHASE_COLORS.glitch} ${(100 * m) / k}%`,
        `${PHASE_COLORS.glitch} ${(100 * n) / k}%`,
        `${PHASE_COLORS.fall} ${(100 * n) / k}%`,
        `${PHASE_COLORS.fall} 100%`,
      ];
      slider.style.background = `linear-gradient(to right, ${stops.join(", ")})`;
      handle.setFrame(0);
    },
    setFrame(index: number) {
      slider.value = String(index);
      readout.textContent = `${index} / ${slider.max}`;
    },
  };

  slider.addEventListener("input", () => onScrub(Number(slider.value)));
  playButton.addEventListener("click", () => {
    handle.playing = !handle.playing;
    playButton.textContent = handle.playing ? "⏸" : "▶";
    onTogglePlay(handle.playing);
  });

  return handle;
}
