// Thin client for the VOD HTTP API. Every frame response keeps its index and
// timestamp together so the UI can never mix an image with the wrong time.

export interface ShotSummary {
  shot_id: number;
  camera_id: string;
  length_s: number;
  frame_count: number;
  size_bytes: number;
  has_video: boolean;
}

export interface FrameSample {
  index: number;
  time_s: number;
}

export interface FrameResponse {
  index: number;
  timeS: number;
  blob: Blob;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async getJson(path: string): Promise<any> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body?.detail ?? `HTTP ${resp.status}`);
    }
    return body;
  }

  async listShots(opts: { from?: number; to?: number; camera?: string; limit?: number } = {}): Promise<ShotSummary[]> {
    const params = new URLSearchParams();
    if (opts.from !== undefined) params.set("from", String(opts.from));
    if (opts.to !== undefined) params.set("to", String(opts.to));
    if (opts.camera) params.set("camera", opts.camera);
    if (opts.limit !== undefined) params.set("limit", String(opts.limit));
    const qs = params.toString();
    const body = await this.getJson(`/api/shots${qs ? "?" + qs : ""}`);
    return body.shots as ShotSummary[];
  }

  async getShot(shotId: number, camera: string): Promise<ShotSummary> {
    return (await this.getJson(`/api/shots/${shotId}/${camera}`)) as ShotSummary;
  }

  async sampledFrames(shotId: number, camera: string, stride: number): Promise<FrameSample[]> {
    const body = await this.getJson(`/api/shots/${shotId}/${camera}/frames?stride=${stride}`);
    return body.frames as FrameSample[];
  }

  // Index and time are read from the same response's headers, never recomputed.
  async fetchFrame(shotId: number, camera: string, index: number): Promise<FrameResponse> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/shots/${shotId}/${camera}/frames/${index}`);
    if (!resp.ok) {
      throw new ApiError(resp.status, `frame ${index}: HTTP ${resp.status}`);
    }
    return {
      index: Number(resp.headers.get("X-Frame-Index")),
      timeS: Number(resp.headers.get("X-Frame-Time")),
      blob: await resp.blob(),
    };
  }

  async fetchFrameAt(shotId: number, camera: string, t: number): Promise<FrameResponse> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/shots/${shotId}/${camera}/frame_at?t=${t}`);
    if (!resp.ok) {
      throw new ApiError(resp.status, `frame_at ${t}: HTTP ${resp.status}`);
    }
    return {
      index: Number(resp.headers.get("X-Frame-Index")),
      timeS: Number(resp.headers.get("X-Frame-Time")),
      blob: await resp.blob(),
    };
  }

  videoUrl(shotId: number, camera: string): string {
    return `${this.baseUrl}/api/shots/${shotId}/${camera}/video`;
  }
}
