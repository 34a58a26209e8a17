/**
 * Client for the classification service.
 *
 * The classify response is a list of at most 10 single-entry objects
 * mapping a symbol id (string key) to its probability, ordered
 * descending by probability.  The order is preserved as received; the
 * UI never re-sorts.  At most one classify request is in flight: a
 * newer submit aborts the previous one.
 */

import { CapturedRecording, serializeRecording } from "./recording.js";

export interface Hypothesis {
  symbolId: string;
  probability: number;
}

export class ResponseFormatError extends Error {}

/** Validate and flatten the wire response, preserving its order. */
export function parseClassifyResponse(payload: unknown): Hypothesis[] {
  if (!Array.isArray(payload)) {
    throw new ResponseFormatError("expected a JSON array");
  }
  if (payload.length > 10) {
    throw new ResponseFormatError("more than 10 hypotheses");
  }
  const hypotheses: Hypothesis[] = [];
  for (const entry of payload) {
    if (typeof entry !== "object" || entry === null || Array.isArray(entry)) {
      throw new ResponseFormatError("hypothesis entry is not an object");
    }
    const keys = Object.keys(entry);
    if (keys.length !== 1) {
      throw new ResponseFormatError("hypothesis entry must have exactly one key");
    }
    const symbolId = keys[0];
    const probability = (entry as Record<string, unknown>)[symbolId];
    if (typeof probability !== "number" || !(probability > 0) || probability > 1) {
      throw new ResponseFormatError(`bad probability for symbol ${symbolId}`);
    }
    hypotheses.push({ symbolId, probability });
  }
  return hypotheses;
}

export class Classifier {
  private inFlight: AbortController | null = null;

  constructor(private baseUrl: string = "") {}

  /** POST the recording; a later call aborts an earlier unfinished one. */
  async classify(recording: CapturedRecording, k = 10): Promise<Hypothesis[]> {
    if (this.inFlight !== null) {
      this.inFlight.abort();
    }
    const controller = new AbortController();
    this.inFlight = controller;
    try {
      const response = await fetch(`${this.baseUrl}/classify`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: `{"recording":${serializeRecording(recording)},"k":${k}}`,
        signal: controller.signal,
      });
      if (!response.ok) {
        throw new Error(`service answered ${response.status}`);
      }
      return parseClassifyResponse(await response.json());
    } finally {
      if (this.inFlight === controller) {
        this.inFlight = null;
      }
    }
  }

  /** The id-to-command table, fetched once at startup. */
  async symbols(): Promise<Record<string, string>> {
    const response = await fetch(`${this.baseUrl}/symbols`);
    if (!response.ok) {
      throw new Error(`service answered ${response.status}`);
    }
    const payload = (await response.json()) as Record<string, string>;
    return payload;
  }
}
