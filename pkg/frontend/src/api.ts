// Typed client for the generation service. The viewer talks to exactly four
// endpoints: /api/v1/attributes, /api/v1/skeleton, /api/v1/generate,
// /api/v1/fk.

export interface AttributeValue {
  name: string;
  display_name: string;
}

export interface AttributeField {
  name: string;
  values: AttributeValue[];
}

export interface AttributesPayload {
  schema_version: number;
  fields: AttributeField[];
}

export interface SkeletonPayload {
  schema_version: number;
  model: string;
  joint_names: string[];
  parent_index: number[];
  bone_offsets: number[][];
}

export interface FrameDoc {
  root_pos: number[];
  root_rot6d: number[];
  joint_rot6d: number[][];
}

export interface SequenceDoc {
  schema_version: number;
  fps: number;
  attributes: Record<string, string>;
  boundaries: { impact_end: number; glitch_end: number };
  frames: FrameDoc[];
}

export interface GenerateMetadata {
  seed: number;
  checkpoint_id: string;
  wall_time_ms: number;
}

export interface GenerateResponse {
  sequence: SequenceDoc;
  metadata: GenerateMetadata;
}

export interface GenerateRequest {
  attributes: Record<string, string>;
  body_model?: string;
  seed?: number | null;
  durations?: [number, number, number] | null;
}

export interface FkResponse {
  model: string;
  positions: number[][][];
}

// Minimal structural slice of fetch so tests can substitute a node:http shim.
export interface FetchLike {
  (url: string, init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  }): Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: Record<string, unknown> = {},
  ) {
    super(message);
  }
}

async function toError(status: number, response: { json(): Promise<unknown> }): Promise<ApiError> {
  let body: Record<string, unknown> = {};
  try {
    body = (await response.json()) as Record<string, unknown>;
  } catch {
    // non-JSON error body; keep the status
  }
  const code = typeof body.code === "string" ? body.code : "http_error";
  const message = typeof body.message === "string" ? body.message : `HTTP ${status}`;
  return new ApiError(status, code, message, body);
}

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchImpl: FetchLike = (url, init) => globalThis.fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) throw await toError(response.status, response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await toError(response.status, response);
    return (await response.json()) as T;
  }

  attributes(): Promise<AttributesPayload> {
    return this.get("/api/v1/attributes");
  }

  skeleton(model: string): Promise<SkeletonPayload> {
    return this.get(`/api/v1/skeleton?model=${encodeURIComponent(model)}`);
  }

  generate(request: GenerateRequest): Promise<GenerateResponse> {
    return this.post("/api/v1/generate", request);
  }

  fk(model: string, frames: FrameDoc[] | number[][]): Promise<FkResponse> {
    return this.post("/api/v1/fk", { model, frames });
  }
}
