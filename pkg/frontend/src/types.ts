export type GateKind = "A" | "B" | "C" | "D" | "E" | "F" | "G" | "H" | "I";

export interface GateEnvelope {
  session_id: string;
  gate_id: string;
  kind: GateKind;
  items: GateItem[];
  payload: Record<string, unknown>;
  allowed_ops: string[];
}

/** Items are kind-specific; the id field name varies per kind. */
export type GateItem = Record<string, unknown>;

export interface EditOp {
  op: "add" | "update" | "delete";
  item_id?: string;
  fields?: Record<string, unknown>;
  item?: Record<string, unknown>;
}

export type Decision = "accept" | "reject" | "iterate";

export interface GateSubmission {
  edits: EditOp[];
  decision?: Decision | null;
  edited_title?: string | null;
  edited_abstract?: string | null;
}

export interface Job {
  job_id: string;
  session_id: string;
  status: "pending" | "running" | "succeeded" | "failed";
  error: string | null;
  error_kind: string | null;
  state?: string | null;
  pending_gate_id?: string | null;
}

export interface GateResponse {
  state: string | null;
  pending_gate: GateEnvelope | null;
  flags: Record<string, unknown>;
}

export interface ProposalVersion {
  title: string;
  abstract: string;
  version: number;
  provenance: string;
}

export interface DiffOp {
  op: "equal" | "insert" | "delete" | "replace";
  old: string;
  new: string;
}

export interface LogEvent {
  event_id: number;
  timestamp: string;
  actor: string;
  kind: string;
  payload: Record<string, unknown>;
}

/** The id field for each item-bearing gate kind. */
export const ID_KEYS: Record<string, string> = {
  A: "paper_id",
  B: "question_id",
  C: "verdict_id",
  D: "gap_id",
  F: "problem_id",
  G: "evidence_id",
  H: "method_id",
};

export const GATE_TITLES: Record<GateKind, string> = {
  A: "Retrieved papers",
  B: "Validation questions",
  C: "Yes verdicts to vet",
  D: "Research gaps",
  E: "Revised proposal",
  F: "Related problems",
  G: "Method evidence",
  H: "Synthesized methods",
  I: "Final proposal",
};
