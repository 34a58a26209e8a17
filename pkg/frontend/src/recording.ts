/**
 * Stroke capture model.
 *
 * Points are canvas pixels with the origin at the top-left corner;
 * times are milliseconds elapsed since the first pointer-down of the
 * drawing, so the first captured point is always at time 0.  A stroke
 * runs from pointer-down to pointer-up.  Serialization produces the
 * service's wire format: an array of stroke arrays whose points are
 * objects with keys x, y, time in exactly that order.
 */

export interface CapturedPoint {
  x: number;
  y: number;
  time: number;
}

export type CapturedStroke = CapturedPoint[];
export type CapturedRecording = CapturedStroke[];

export class StrokeBuffer {
  private strokes: CapturedStroke[] = [];
  private current: CapturedStroke | null = null;
  private originMs: number | null = null;

  get strokeCount(): number {
    return this.strokes.length;
  }

  isEmpty(): boolean {
    return this.strokes.length === 0 && this.current === null;
  }

  isDrawing(): boolean {
    return this.current !== null;
  }

  /** Pointer-down: opens a stroke and records its first point. */
  beginStroke(x: number, y: number, nowMs: number): void {
    if (this.current !== null) {
      this.endStroke();
    }
    if (this.originMs === null) {
      this.originMs = nowMs;
    }
    this.current = [];
    this.pushPoint(x, y, nowMs);
  }

  /** Pointer-move: appends to the open stroke; ignored when the pen is up. */
  addPoint(x: number, y: number, nowMs: number): void {
    if (this.current === null) {
      return;
    }
    this.pushPoint(x, y, nowMs);
  }

  /** Pointer-up: closes the open stroke. */
  endStroke(): void {
    if (this.current !== null && this.current.length > 0) {
      this.strokes.push(this.current);
    }
    this.current = null;
  }

  undoLastStroke(): void {
    if (this.current !== null) {
      this.current = null;
      return;
    }
    this.strokes.pop();
    if (this.isEmpty()) {
      this.originMs = null;
    }
  }

  clear(): void {
    this.strokes = [];
    this.current = null;
    this.originMs = null;
  }

  /** Closed strokes as a deep copy (an open stroke is not included). */
  snapshot(): CapturedRecording {
    return this.strokes.map((stroke) => stroke.map((point) => ({ ...point })));
  }

  private pushPoint(x: number, y: number, nowMs: number): void {
    const time = Math.max(0, Math.round(nowMs - (this.originMs as number)));
    this.current!.push({ x: Math.round(x), y: Math.round(y), time });
  }
}

/**
 * Wire-format serialization.  JSON.stringify keeps object-literal key
 * insertion order, so every point serializes as {"x":..,"y":..,"time":..}
 * with no whitespace, byte-for-byte what the service parses.
 */
export function serializeRecording(recording: CapturedRecording): string {
  return JSON.stringify(
    recording.map((stroke) =>
      stroke.map((point) => ({ x: point.x, y: point.y, time: point.time })),
    ),
  );
}
