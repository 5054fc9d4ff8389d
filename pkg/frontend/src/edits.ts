import type { Decision, EditOp, GateEnvelope, GateItem, GateSubmission } from "./types";
import { ID_KEYS } from "./types";

/** Fields the researcher may change in place, per gate kind. */
const EDITABLE: Record<string, string[]> = {
  B: ["text"],
  D: ["selected", "text"],
  F: ["text"],
  G: ["accepted", "methodology_text"],
  H: ["accepted", "text"],
};

export interface WorkingItem {
  id: string;
  original: GateItem | null; // null for researcher-added items
  current: GateItem;
  deleted: boolean;
}

/** Mutable mirror of a gate view. The edit set sent to the server is
 * computed from this copy's final visible state, so what the researcher
 * sees is exactly what gets submitted. */
export class WorkingCopy {
  items: WorkingItem[];
  decision: Decision | null = null;
  editedTitle: string | null = null;
  editedAbstract: string | null = null;
  problemStatement: string | null = null; // gate F only
  private addCounter = 0;

  constructor(public envelope: GateEnvelope) {
    const idKey = ID_KEYS[envelope.kind];
    this.items = envelope.items.map((item) => ({
      id: String(item[idKey]),
      original: item,
      current: { ...item },
      deleted: false,
    }));
  }

  get idKey(): string {
    return ID_KEYS[this.envelope.kind];
  }

  find(id: string): WorkingItem {
    const item = this.items.find((i) => i.id === id);
    if (!item) throw new Error(`no item ${id} in gate ${this.envelope.gate_id}`);
    return item;
  }

  visible(): WorkingItem[] {
    return this.items.filter((i) => !i.deleted);
  }

  markDeleted(id: string): void {
    this.find(id).deleted = true;
  }

  restore(id: string): void {
    this.find(id).deleted = false;
  }

  setField(id: string, field: string, value: unknown): void {
    const allowed = EDITABLE[this.envelope.kind] ?? [];
    if (!allowed.includes(field)) {
      throw new Error(`field ${field} is not editable at gate ${this.envelope.kind}`);
    }
    this.find(id).current[field] = value;
  }

  addItem(data: GateItem): WorkingItem {
    this.addCounter += 1;
    const item: WorkingItem = {
      id: `new-${this.addCounter}`,
      original: null,
      current: { ...data },
      deleted: false,
    };
    this.items.push(item);
    return item;
  }
}

/** Derive the edit operations from the final visible state of the copy. */
export function computeEdits(copy: WorkingCopy): EditOp[] {
  const ops: EditOp[] = [];
  for (const item of copy.items) {
    if (item.original === null) {
      if (!item.deleted) ops.push({ op: "add", item: item.current });
      continue;
    }
    if (item.deleted) {
      ops.push({ op: "delete", item_id: item.id });
      continue;
    }
    const changed: Record<string, unknown> = {};
    for (const field of EDITABLE[copy.envelope.kind] ?? []) {
      if (field in item.current && item.current[field] !== item.original[field]) {
        changed[field] = item.current[field];
      }
    }
    if (Object.keys(changed).length > 0) {
      ops.push({ op: "update", item_id: item.id, fields: changed });
    }
  }
  if (copy.envelope.kind === "F" && copy.problemStatement !== null) {
    const before = String(copy.envelope.payload["problem_statement"] ?? "");
    if (copy.problemStatement !== before) {
      ops.push({ op: "update", item_id: "problem_statement", fields: { text: copy.problemStatement } });
    }
  }
  return ops;
}

export function buildSubmission(copy: WorkingCopy): GateSubmission {
  const submission: GateSubmission = { edits: computeEdits(copy) };
  if (copy.envelope.kind === "E" || copy.envelope.kind === "I") {
    submission.decision = copy.decision;
    submission.edited_title = copy.editedTitle;
    submission.edited_abstract = copy.editedAbstract;
  }
  return submission;
}
