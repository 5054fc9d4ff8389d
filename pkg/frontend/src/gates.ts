import type { WorkingCopy, WorkingItem } from "./edits";
import { renderDiff } from "./diff";
import type { Decision, DiffOp, ProposalVersion } from "./types";
import { GATE_TITLES } from "./types";

export interface GateHandlers {
  /** Destructive edits (delete) go through here first. */
  confirm: (message: string) => boolean;
  /** Called after every mutation so the wizard can re-render. */
  onChange: () => void;
}

const el = (tag: string, cls?: string, text?: string): HTMLElement => {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
};

function deleteButton(copy: WorkingCopy, item: WorkingItem, handlers: GateHandlers, label: string): HTMLElement {
  const btn = el("button", "btn-delete", label) as HTMLButtonElement;
  btn.addEventListener("click", () => {
    if (!handlers.confirm(`Remove ${item.id}? This cannot be undone after submit.`)) return;
    copy.markDeleted(item.id);
    handlers.onChange();
  });
  return btn;
}

function checkbox(
  copy: WorkingCopy,
  item: WorkingItem,
  field: string,
  label: string,
  handlers: GateHandlers,
): HTMLElement {
  const wrap = el("label", "check");
  const box = document.createElement("input");
  box.type = "checkbox";
  box.checked = Boolean(item.current[field]);
  box.setAttribute("data-field", field);
  box.addEventListener("change", () => {
    copy.setField(item.id, field, box.checked);
    handlers.onChange();
  });
  wrap.appendChild(box);
  wrap.appendChild(el("span", undefined, label));
  return wrap;
}

function textEditor(
  copy: WorkingCopy,
  item: WorkingItem,
  field: string,
  handlers: GateHandlers,
): HTMLElement {
  const area = document.createElement("textarea");
  area.value = String(item.current[field] ?? "");
  area.setAttribute("data-field", field);
  area.addEventListener("change", () => {
    copy.setField(item.id, field, area.value);
    handlers.onChange();
  });
  return area;
}

function card(item: WorkingItem): HTMLElement {
  const node = el("div", "card");
  node.setAttribute("data-item-id", item.id);
  return node;
}

type Renderer = (copy: WorkingCopy, handlers: GateHandlers) => HTMLElement;

const renderPapers: Renderer = (copy, handlers) => {
  const root = el("div", "gate gate-a");
  if (copy.envelope.payload["add_papers_required"]) {
    root.appendChild(el("p", "notice", "No papers were retrieved. Add papers to continue."));
  }
  for (const item of copy.visible()) {
    const c = card(item);
    const head = el("div", "card-head");
    head.appendChild(el("strong", undefined, String(item.current["title"] ?? item.id)));
    if (item.current["previously_seen"]) head.appendChild(el("span", "badge", "seen before"));
    if (item.current["rank"] != null) {
      head.appendChild(el("span", "rank", `#${item.current["rank"]}`));
    }
    c.appendChild(head);
    // the relevance blurb is the vetting surface: never truncate it
    c.appendChild(el("p", "relevance", String(item.current["relevance"] ?? "")));
    c.appendChild(deleteButton(copy, item, handlers, "Remove paper"));
    root.appendChild(c);
  }
  const form = el("div", "add-form");
  const id = document.createElement("input");
  id.placeholder = "paper id";
  id.setAttribute("data-add", "paper_id");
  const title = document.createElement("input");
  title.placeholder = "title";
  title.setAttribute("data-add", "title");
  const abstract = document.createElement("input");
  abstract.placeholder = "abstract";
  abstract.setAttribute("data-add", "abstract");
  const add = el("button", "btn-add", "Add paper") as HTMLButtonElement;
  add.addEventListener("click", () => {
    if (!id.value.trim()) return;
    copy.addItem({ paper_id: id.value.trim(), title: title.value, abstract: abstract.value });
    handlers.onChange();
  });
  for (const node of [id, title, abstract, add]) form.appendChild(node);
  root.appendChild(form);
  return root;
};

const renderQuestions: Renderer = (copy, handlers) => {
  const root = el("div", "gate gate-b");
  if (copy.envelope.payload["authoring_required"]) {
    root.appendChild(el("p", "notice", "No questions were generated. Author at least one."));
  }
  for (const item of copy.visible()) {
    const c = card(item);
    c.appendChild(el("div", "meta", `${item.id} · ${item.current["status"]}`));
    if (item.current["auto_prefixed"]) c.appendChild(el("span", "badge", "auto-prefixed"));
    c.appendChild(textEditor(copy, item, "text", handlers));
    c.appendChild(el("p", "hint", String(item.current["source_motivation_bullet"] ?? "")));
    c.appendChild(deleteButton(copy, item, handlers, "Delete question"));
    root.appendChild(c);
  }
  const form = el("div", "add-form");
  const text = document.createElement("input");
  text.placeholder = "Is the research paper ...";
  text.setAttribute("data-add", "text");
  const add = el("button", "btn-add", "Add question") as HTMLButtonElement;
  add.addEventListener("click", () => {
    if (!text.value.trim()) return;
    copy.addItem({ text: text.value.trim() });
    handlers.onChange();
  });
  form.appendChild(text);
  form.appendChild(add);
  root.appendChild(form);
  return root;
};

const renderVerdicts: Renderer = (copy, handlers) => {
  const root = el("div", "gate gate-c");
  root.appendChild(el(
    "p", "hint",
    "Each paper below answered Yes. Remove any whose justification does not hold up.",
  ));
  for (const item of copy.visible()) {
    const c = card(item);
    c.appendChild(el("strong", undefined, String(item.current["paper_id"])));
    // full justification, unabridged: this is the hallucination check
    c.appendChild(el("p", "justification", String(item.current["justification"] ?? "")));
    const chunks = (item.current["supporting_chunk_ids"] as string[]) ?? [];
    c.appendChild(el("div", "meta", `supported by: ${chunks.join(", ")}`));
    c.appendChild(deleteButton(copy, item, handlers, "Disagree (remove)"));
    root.appendChild(c);
  }
  return root;
};

const renderGaps: Renderer = (copy, handlers) => {
  const root = el("div", "gate gate-d");
  root.appendChild(el("p", "hint", "Select the gaps the rewrite should address."));
  const groups = new Map<string, WorkingItem[]>();
  for (const item of copy.visible()) {
    const paper = String(item.current["paper_id"] ?? "") || "(researcher)";
    if (!groups.has(paper)) groups.set(paper, []);
    groups.get(paper)!.push(item);
  }
  for (const [paper, items] of groups) {
    const group = el("div", "group");
    group.appendChild(el("h3", undefined, paper));
    for (const item of items) {
      const c = card(item);
      c.appendChild(checkbox(copy, item, "selected", "use in rewrite", handlers));
      c.appendChild(textEditor(copy, item, "text", handlers));
      c.appendChild(deleteButton(copy, item, handlers, "Delete gap"));
      group.appendChild(c);
    }
    root.appendChild(group);
  }
  const form = el("div", "add-form");
  const text = document.createElement("input");
  text.placeholder = "add your own gap";
  text.setAttribute("data-add", "text");
  const add = el("button", "btn-add", "Add gap") as HTMLButtonElement;
  add.addEventListener("click", () => {
    if (!text.value.trim()) return;
    copy.addItem({ text: text.value.trim() });
    handlers.onChange();
  });
  form.appendChild(text);
  form.appendChild(add);
  root.appendChild(form);
  return root;
};

function renderRewrite(copy: WorkingCopy, handlers: GateHandlers, withIterate: boolean): HTMLElement {
  const root = el("div", "gate gate-rewrite");
  const current = copy.envelope.payload["current"] as ProposalVersion;
  const candidate = copy.envelope.payload["candidate"] as ProposalVersion;
  const columns = el("div", "columns");
  const left = el("div", "col");
  left.appendChild(el("h3", undefined, `Current (v${current.version})`));
  left.appendChild(el("p", "abstract", current.abstract));
  const right = el("div", "col");
  right.appendChild(el("h3", undefined, `Proposed (v${candidate.version})`));
  right.appendChild(el("p", "abstract", candidate.abstract));
  columns.appendChild(left);
  columns.appendChild(right);
  root.appendChild(columns);
  root.appendChild(el("h3", undefined, "Word diff"));
  root.appendChild(renderDiff((copy.envelope.payload["diff"] as DiffOp[]) ?? []));

  root.appendChild(el("h3", undefined, "Optional final edit"));
  const editor = document.createElement("textarea");
  editor.setAttribute("data-field", "edited_abstract");
  editor.value = copy.editedAbstract ?? "";
  editor.placeholder = "leave empty to accept the proposed text as is";
  editor.addEventListener("change", () => {
    copy.editedAbstract = editor.value.trim() ? editor.value : null;
    handlers.onChange();
  });
  root.appendChild(editor);

  const actions = el("div", "decision-row");
  const options: Decision[] = withIterate ? ["accept", "iterate", "reject"] : ["accept", "reject"];
  for (const option of options) {
    const label = el("label", "radio");
    const radio = document.createElement("input");
    radio.type = "radio";
    radio.name = "decision";
    radio.value = option;
    radio.checked = copy.decision === option;
    radio.addEventListener("change", () => {
      copy.decision = option;
      handlers.onChange();
    });
    label.appendChild(radio);
    label.appendChild(el("span", undefined,
      option === "iterate" ? "accept and revalidate" : option));
    actions.appendChild(label);
  }
  root.appendChild(actions);
  return root;
}

const renderProblems: Renderer = (copy, handlers) => {
  const root = el("div", "gate gate-f");
  root.appendChild(el("h3", undefined, "Problem statement"));
  const editor = document.createElement("textarea");
  editor.setAttribute("data-field", "problem_statement");
  editor.value = copy.problemStatement ?? String(copy.envelope.payload["problem_statement"] ?? "");
  editor.addEventListener("change", () => {
    copy.problemStatement = editor.value;
    handlers.onChange();
  });
  root.appendChild(editor);
  for (const item of copy.visible()) {
    const c = card(item);
    c.appendChild(el("span", "badge", String(item.current["kind"])));
    c.appendChild(textEditor(copy, item, "text", handlers));
    c.appendChild(deleteButton(copy, item, handlers, "Delete problem"));
    root.appendChild(c);
  }
  const form = el("div", "add-form");
  const text = document.createElement("input");
  text.placeholder = "add a problem";
  text.setAttribute("data-add", "text");
  const kind = document.createElement("select");
  for (const value of ["similar", "subtask"]) {
    const opt = document.createElement("option");
    opt.value = value;
    opt.textContent = value;
    kind.appendChild(opt);
  }
  const add = el("button", "btn-add", "Add problem") as HTMLButtonElement;
  add.addEventListener("click", () => {
    if (!text.value.trim()) return;
    copy.addItem({ text: text.value.trim(), kind: kind.value });
    handlers.onChange();
  });
  for (const node of [text, kind, add]) form.appendChild(node);
  root.appendChild(form);
  return root;
};

const renderEvidence: Renderer = (copy, handlers) => {
  const root = el("div", "gate gate-g");
  root.appendChild(el("p", "hint", "Keep the approaches worth synthesizing from."));
  for (const item of copy.visible()) {
    const c = card(item);
    c.appendChild(el("strong", undefined,
      `${item.current["paper_id"]} · ${item.current["problem_id"]}`));
    c.appendChild(el("p", "justification", String(item.current["methodology_text"] ?? "")));
    c.appendChild(checkbox(copy, item, "accepted", "accept", handlers));
    c.appendChild(deleteButton(copy, item, handlers, "Delete evidence"));
    root.appendChild(c);
  }
  return root;
};

const renderMethods: Renderer = (copy, handlers) => {
  const root = el("div", "gate gate-h");
  root.appendChild(el("p", "hint", "Choose the methods to fold into the proposal."));
  for (const item of copy.visible()) {
    const c = card(item);
    c.appendChild(el("div", "meta", item.id));
    c.appendChild(checkbox(copy, item, "accepted", "accept", handlers));
    c.appendChild(textEditor(copy, item, "text", handlers));
    const evidence = (item.current["evidence_ids"] as string[]) ?? [];
    c.appendChild(el("div", "meta",
      evidence.length ? `evidence: ${evidence.join(", ")}` : "parametric only"));
    root.appendChild(c);
  }
  return root;
};

const RENDERERS: Record<string, Renderer> = {
  A: renderPapers,
  B: renderQuestions,
  C: renderVerdicts,
  D: renderGaps,
  E: (copy, handlers) => renderRewrite(copy, handlers, true),
  F: renderProblems,
  G: renderEvidence,
  H: renderMethods,
  I: (copy, handlers) => renderRewrite(copy, handlers, false),
};

export function renderGate(copy: WorkingCopy, handlers: GateHandlers): HTMLElement {
  const root = el("section", "gate-view");
  root.setAttribute("data-gate-id", copy.envelope.gate_id);
  root.setAttribute("data-gate-kind", copy.envelope.kind);
  const title = el("h2", undefined, GATE_TITLES[copy.envelope.kind]);
  root.appendChild(title);
  root.appendChild(RENDERERS[copy.envelope.kind](copy, handlers));
  return root;
}
