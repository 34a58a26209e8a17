/**
 * DOM rendering for the ranked hypothesis list and the error banner.
 * Rows appear in exactly the order the service returned them.
 */

import { Hypothesis } from "./api.js";

export function renderHypotheses(
  list: HTMLElement,
  hypotheses: Hypothesis[],
  commands: Record<string, string>,
): void {
  const doc = list.ownerDocument;
  list.textContent = "";
  for (const hypothesis of hypotheses) {
    const row = doc.createElement("li");
    row.className = "hypothesis";

    const command = doc.createElement("code");
    command.className = "command";
    command.textContent = commands[hypothesis.symbolId] ?? `#${hypothesis.symbolId}`;
    row.appendChild(command);

    const probability = doc.createElement("span");
    probability.className = "probability";
    probability.textContent = `${(hypothesis.probability * 100).toFixed(1)} %`;
    row.appendChild(probability);

    const copy = doc.createElement("button");
    copy.type = "button";
    copy.className = "copy";
    copy.textContent = "copy";
    copy.addEventListener("click", () => {
      void navigator.clipboard?.writeText(command.textContent ?? "");
    });
    row.appendChild(copy);

    list.appendChild(row);
  }
}

export function showError(banner: HTMLElement, message: string): void {
  const label = banner.querySelector(".message");
  if (label) {
    label.textContent = message;
  } else {
    banner.textContent = message;
  }
  banner.hidden = false;
}

export function clearError(banner: HTMLElement): void {
  banner.hidden = true;
}
