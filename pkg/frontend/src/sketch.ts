// Freehand sketch capture: pointer samples in canvas pixels, normalized to
// [0,1]x[0,1] on submit. The payload is exactly what POST /search/motion
// expects; normalization clamps so every recordable stroke validates.

export const MAX_POINTS_PER_STROKE = 60;
const MIN_SAMPLE_SPACING_PX = 2;

export type PixelPoint = [number, number];
export type NormalizedPoint = [number, number];

export interface SketchState {
  points: PixelPoint[];
  drawing: boolean;
}

/** Uniform index decimation down to `max` points; endpoints always kept. */
export function decimate(points: PixelPoint[], max = MAX_POINTS_PER_STROKE): PixelPoint[] {
  if (points.length <= max) return points.slice();
  const out: PixelPoint[] = [];
  for (let k = 0; k < max; k++) {
    const idx = Math.round((k * (points.length - 1)) / (max - 1));
    out.push(points[idx]);
  }
  return out;
}

export function normalizePoints(
  points: PixelPoint[],
  width: number,
  height: number,
): NormalizedPoint[] {
  return points.map(([x, y]) => [
    Math.min(1, Math.max(0, x / width)),
    Math.min(1, Math.max(0, y / height)),
  ]);
}

/** Structural check mirroring the service schema: >= 2 [x, y] pairs, all
 * coordinates within [0,1]. */
export function isValidSketchPayload(payload: unknown): payload is { points: NormalizedPoint[] } {
  if (typeof payload !== "object" || payload === null) return false;
  const points = (payload as { points?: unknown }).points;
  if (!Array.isArray(points) || points.length < 2) return false;
  return points.every(
    (p) =>
      Array.isArray(p) &&
      p.length === 2 &&
      p.every((v) => typeof v === "number" && v >= 0 && v <= 1),
  );
}

export class SketchPad {
  readonly state: SketchState = { points: [], drawing: false };
  private ctx: CanvasRenderingContext2D | null;

  constructor(readonly canvas: HTMLCanvasElement) {
    this.ctx = canvas.getContext("2d");
    canvas.addEventListener("pointerdown", (e) => this.start(e as PointerEvent));
    canvas.addEventListener("pointermove", (e) => this.extend(e as PointerEvent));
    canvas.addEventListener("pointerup", () => this.finish());
    canvas.addEventListener("pointerleave", () => this.finish());
    if (this.ctx) {
      this.ctx.lineWidth = 2;
      this.ctx.lineCap = "round";
      this.ctx.strokeStyle = "#1f5fbf";
    }
  }

  private canvasPoint(e: PointerEvent): PixelPoint {
    const rect = this.canvas.getBoundingClientRect();
    return [e.clientX - rect.left, e.clientY - rect.top];
  }

  private start(e: PointerEvent): void {
    // a new stroke replaces the previous one
    this.state.points = [this.canvasPoint(e)];
    this.state.drawing = true;
    this.redraw();
  }

  private extend(e: PointerEvent): void {
    if (!this.state.drawing) return;
    const [x, y] = this.canvasPoint(e);
    const last = this.state.points[this.state.points.length - 1];
    if (last && Math.hypot(x - last[0], y - last[1]) < MIN_SAMPLE_SPACING_PX) return;
    this.state.points.push([x, y]);
    this.redraw();
  }

  private finish(): void {
    this.state.drawing = false;
  }

  clear(): void {
    this.state.points = [];
    this.state.drawing = false;
    this.redraw();
  }

  /** Normalized payload for submission, or null when the stroke is too
   * short to be a trajectory. The drawn stroke stays on the canvas. */
  payload(): { points: NormalizedPoint[] } | null {
    const rect = this.canvas.getBoundingClientRect();
    const width = rect.width || this.canvas.width;
    const height = rect.height || this.canvas.height;
    const kept = decimate(this.state.points);
    if (kept.length < 2) return null;
    return { points: normalizePoints(kept, width, height) };
  }

  private redraw(): void {
    if (!this.ctx) return; // jsdom has no 2D context; capture still works
    this.ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    const pts = this.state.points;
    if (pts.length < 2) return;
    this.ctx.beginPath();
    this.ctx.moveTo(pts[0][0], pts[0][1]);
    for (const [x, y] of pts.slice(1)) this.ctx.lineTo(x, y);
    this.ctx.stroke();
  }
}
