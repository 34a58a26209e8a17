/**
 * Wiring: a free drawing canvas (no guide box), submit/undo/clear
 * controls, and the ranked result list.
 */

import { Classifier } from "./api.js";
import { StrokeBuffer } from "./recording.js";
import { clearError, renderHypotheses, showError } from "./view.js";

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

function redraw(canvas: HTMLCanvasElement, buffer: StrokeBuffer, live: number[][]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.lineWidth = 2.5;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  ctx.strokeStyle = "#222";
  ctx.fillStyle = "#222";
  const strokes = buffer.snapshot().map((s) => s.map((p) => [p.x, p.y]));
  if (live.length > 0) {
    strokes.push(live);
  }
  for (const stroke of strokes) {
    if (stroke.length === 1) {
      ctx.beginPath();
      ctx.arc(stroke[0][0], stroke[0][1], 1.5, 0, 2 * Math.PI);
      ctx.fill();
      continue;
    }
    ctx.beginPath();
    ctx.moveTo(stroke[0][0], stroke[0][1]);
    for (const [x, y] of stroke.slice(1)) {
      ctx.lineTo(x, y);
    }
    ctx.stroke();
  }
}

export function start(): void {
  const canvas = element<HTMLCanvasElement>("pad");
  const submit = element<HTMLButtonElement>("submit");
  const undo = element<HTMLButtonElement>("undo");
  const clear = element<HTMLButtonElement>("clear");
  const results = element<HTMLElement>("results");
  const banner = element<HTMLElement>("error-banner");
  const retry = element<HTMLButtonElement>("retry");

  const buffer = new StrokeBuffer();
  const classifier = new Classifier("");
  let commands: Record<string, string> = {};
  let live: number[][] = [];

  classifier
    .symbols()
    .then((table) => {
      commands = table;
    })
    .catch(() => showError(banner, "could not load the symbol table"));

  const syncControls = () => {
    submit.disabled = buffer.isEmpty();
    undo.disabled = buffer.isEmpty();
    clear.disabled = buffer.isEmpty();
  };

  const position = (event: PointerEvent): [number, number] => {
    const rect = canvas.getBoundingClientRect();
    return [event.clientX - rect.left, event.clientY - rect.top];
  };

  canvas.addEventListener("pointerdown", (event) => {
    event.preventDefault();
    canvas.setPointerCapture(event.pointerId);
    const [x, y] = position(event);
    buffer.beginStroke(x, y, performance.now());
    live = [[Math.round(x), Math.round(y)]];
    redraw(canvas, buffer, live);
    syncControls();
  });

  canvas.addEventListener("pointermove", (event) => {
    if (!buffer.isDrawing()) {
      return;
    }
    const [x, y] = position(event);
    buffer.addPoint(x, y, performance.now());
    live.push([Math.round(x), Math.round(y)]);
    redraw(canvas, buffer, live);
  });

  const finishStroke = () => {
    if (buffer.isDrawing()) {
      buffer.endStroke();
      live = [];
      redraw(canvas, buffer, live);
      syncControls();
    }
  };
  canvas.addEventListener("pointerup", finishStroke);
  canvas.addEventListener("pointercancel", finishStroke);
  canvas.addEventListener("pointerleave", finishStroke);

  undo.addEventListener("click", () => {
    buffer.undoLastStroke();
    live = [];
    redraw(canvas, buffer, live);
    syncControls();
  });

  clear.addEventListener("click", () => {
    buffer.clear();
    live = [];
    results.textContent = "";
    clearError(banner);
    redraw(canvas, buffer, live);
    syncControls();
  });

  const submitDrawing = () => {
    if (buffer.isEmpty()) {
      return;
    }
    clearError(banner);
    classifier
      .classify(buffer.snapshot())
      .then((hypotheses) => renderHypotheses(results, hypotheses, commands))
      .catch((err: unknown) => {
        if (err instanceof DOMException && err.name === "AbortError") {
          return; // superseded by a newer submit
        }
        showError(banner, `classification failed: ${String(err)}`);
      });
  };
  submit.addEventListener("click", submitDrawing);
  retry.addEventListener("click", submitDrawing);

  syncControls();
}

if (typeof document !== "undefined" && document.getElementById("pad")) {
  start();
}
