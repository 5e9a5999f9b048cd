// Viewer state: attribute selection, the current sequence, scrub position,
// and the active body model. Joint positions come from the client-side FK,
// so switching body model re-skins the loaded sequence without another
// generate round trip.

import type {
  ApiClient,
  AttributesPayload,
  GenerateMetadata,
  GenerateResponse,
  SequenceDoc,
} from "./api";
import { buildSkeleton, fkFrames, type SkeletonDef } from "./fk";

export type Phase = "impact" | "glitch" | "fall";

export const PHASES: Phase[] = ["impact", "glitch", "fall"];

export const DEFAULT_BODY_MODEL = "male";

export class ViewerState {
  attributes: AttributesPayload | null = null;
  selection: Record<string, string> = {};
  durations: [number, number, number] | null = null;
  seed: number | null = null;
  bodyModel: string = DEFAULT_BODY_MODEL;

  sequence: SequenceDoc | null = null;
  metadata: GenerateMetadata | null = null;
  frame = 0;
  positions: number[][][] | null = null;

  private skeletonCache = new Map<string, SkeletonDef>();

  constructor(private api: ApiClient) {}

  // Attribute vocabularies + the default skeleton; selection starts on each
  // field's first value.
  async init(): Promise<void> {
    this.attributes = await this.api.attributes();
    for (const field of this.attributes.fields) {
      if (!(field.name in this.selection)) {
        this.selection[field.name] = field.values[0].name;
      }
    }
    await this.loadSkeleton(this.bodyModel);
  }

  async loadSkeleton(model: string): Promise<SkeletonDef> {
    let skeleton = this.skeletonCache.get(model);
    if (!skeleton) {
      skeleton = buildSkeleton(await this.api.skeleton(model));
      this.skeletonCache.set(model, skeleton);
    }
    return skeleton;
  }

  get skeleton(): SkeletonDef | null {
    return this.skeletonCache.get(this.bodyModel) ?? null;
  }

  select(field: string, value: string): void {
    this.selection[field] = value;
  }

  async generate(): Promise<GenerateResponse> {
    const response = await this.api.generate({
      attributes: { ...this.selection },
      body_model: this.bodyModel,
      seed: this.seed,
      durations: this.durations,
    });
    this.sequence = response.sequence;
    this.metadata = response.metadata;
    this.frame = 0;
    this.reskin();
    return response;
  }

  // Re-run FK for the loaded sequence under the active body model. Never
  // touches the network beyond a (cached) skeleton fetch; the sequence and
  // its seed stay as generated.
  async setBodyModel(model: string): Promise<void> {
    const skeleton = await this.loadSkeleton(model);
    this.bodyModel = model;
    void skeleton;
    this.reskin();
  }

  private reskin(): void {
    const skeleton = this.skeleton;
    this.positions =
      skeleton && this.sequence ? fkFrames(skeleton, this.sequence.frames) : null;
  }

  frameCount(): number {
    return this.sequence ? this.sequence.frames.length : 0;
  }

  setFrame(index: number): void {
    const count = this.frameCount();
    this.frame = count ? Math.min(Math.max(0, Math.floor(index)), count - 1) : 0;
  }

  positionsAt(index: number): number[][] | null {
    if (!this.positions || index < 0 || index >= this.positions.length) return null;
    return this.positions[index];
  }

  currentPositions(): number[][] | null {
    return this.positionsAt(this.frame);
  }

  phaseOf(index: number): Phase {
    const seq = this.sequence;
    if (!seq) return "impact";
    if (index < seq.boundaries.impact_end) return "impact";
    if (index < seq.boundaries.glitch_end) return "glitch";
    return "fall";
  }

  // JSON-ready document of what is on screen, for the download button.
  exportDocument(): Record<string, unknown> | null {
    if (!this.sequence) return null;
    return {
      sequence: this.sequence,
      metadata: this.metadata,
      body_model: this.bodyModel,
    };
  }
}
