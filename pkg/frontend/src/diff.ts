import type { DiffOp } from "./types";

/** Render the server's word-level diff ops into styled spans. */
export function renderDiff(ops: DiffOp[]): HTMLElement {
  const container = document.createElement("div");
  container.className = "diff";
  for (const op of ops) {
    if (op.op === "equal") {
      container.appendChild(span("diff-equal", op.old));
    } else if (op.op === "delete") {
      container.appendChild(span("diff-del", op.old));
    } else if (op.op === "insert") {
      container.appendChild(span("diff-ins", op.new));
    } else {
      container.appendChild(span("diff-del", op.old));
      container.appendChild(span("diff-ins", op.new));
    }
  }
  return container;
}

function span(cls: string, text: string): HTMLElement {
  const el = document.createElement("span");
  el.className = cls;
  el.textContent = text + " ";
  return el;
}
