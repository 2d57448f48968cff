// Typed client for the clipseek HTTP service. The UI talks only to these
// documented routes; every function either returns the parsed success body
// or throws an ApiRequestError carrying the server's {code, message}.

export interface RegisterSummary {
  v_id: number;
  name: string;
  keyframe_count: number;
}

export interface ClipResultEntry {
  v_id: number;
  v_name: string;
  distance: number;
  thumbnail_url: string;
}

export interface ClipSearchResponse {
  results: ClipResultEntry[];
  timings: { retrieval_ms: number; matching_ms: number };
}

export interface MotionResultEntry {
  v_id: number;
  v_name: string;
  score: number;
}

export interface MotionSearchResponse {
  results: MotionResultEntry[];
}

export interface VideoSummary {
  v_id: number;
  v_name: string;
  keyframe_count: number;
  dostore: string;
}

export interface VideoListing {
  videos: VideoSummary[];
  total: number;
}

export interface KeyframeSummary {
  i_id: number;
  i_name: string;
  bucket: [number, number];
  majorregions: number;
  thumbnail_url: string;
}

export interface VideoDetail {
  v_id: number;
  v_name: string;
  dostore: string;
  has_trajectory: boolean;
  keyframes: KeyframeSummary[];
}

export class ApiRequestError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function parseOrThrow<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let code = "Internal";
  let message = `request failed with status ${resp.status}`;
  try {
    const body = await resp.json();
    if (typeof body.code === "string") code = body.code;
    if (typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep the fallback
  }
  throw new ApiRequestError(code, message, resp.status);
}

export class ClipseekApi {
  constructor(readonly base: string) {}

  private url(path: string): string {
    return this.base.replace(/\/$/, "") + path;
  }

  thumbnailUrl(path: string): string {
    return this.url(path);
  }

  async registerVideo(name: string, archive: File): Promise<RegisterSummary> {
    const form = new FormData();
    form.append("name", name);
    form.append("archive", archive);
    const resp = await fetch(this.url("/videos"), { method: "POST", body: form });
    return parseOrThrow<RegisterSummary>(resp);
  }

  async searchClip(archive: File, k: number): Promise<ClipSearchResponse> {
    const form = new FormData();
    form.append("archive", archive);
    form.append("k", String(k));
    const resp = await fetch(this.url("/search"), { method: "POST", body: form });
    return parseOrThrow<ClipSearchResponse>(resp);
  }

  async searchMotion(points: [number, number][]): Promise<MotionSearchResponse> {
    const resp = await fetch(this.url("/search/motion"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ points }),
    });
    return parseOrThrow<MotionSearchResponse>(resp);
  }

  async listVideos(limit = 50, offset = 0): Promise<VideoListing> {
    const resp = await fetch(this.url(`/videos?limit=${limit}&offset=${offset}`));
    return parseOrThrow<VideoListing>(resp);
  }

  async videoDetail(vId: number): Promise<VideoDetail> {
    const resp = await fetch(this.url(`/videos/${vId}`));
    return parseOrThrow<VideoDetail>(resp);
  }
}

/** Per-panel request sequence: responses whose ticket is no longer the
 * newest are discarded instead of rendered. */
export class RequestSequence {
  private current = 0;

  next(): number {
    return ++this.current;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.current;
  }
}
