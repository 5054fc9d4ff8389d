import { describe, expect, it } from "vitest";

import { WorkingCopy, buildSubmission, computeEdits } from "../src/edits";
import type { GateEnvelope } from "../src/types";

function envelope(kind: GateEnvelope["kind"], items: Record<string, unknown>[], payload = {}): GateEnvelope {
  return {
    session_id: "s",
    gate_id: "s:g1",
    kind,
    items,
    payload,
    allowed_ops: [],
  };
}

describe("WorkingCopy", () => {
  it("mirrors envelope items with ids preserved", () => {
    const copy = new WorkingCopy(envelope("C", [
      { verdict_id: "q0.1::p1", justification: "because" },
      { verdict_id: "q0.1::p2", justification: "therefore" },
    ]));
    expect(copy.items.map((i) => i.id)).toEqual(["q0.1::p1", "q0.1::p2"]);
    expect(copy.visible()).toHaveLength(2);
  });

  it("rejects edits to fields the gate does not allow", () => {
    const copy = new WorkingCopy(envelope("C", [{ verdict_id: "v1" }]));
    expect(() => copy.setField("v1", "justification", "rewritten")).toThrow(/not editable/);
  });

  it("delete then restore leaves no edit", () => {
    const copy = new WorkingCopy(envelope("A", [{ paper_id: "p1" }]));
    copy.markDeleted("p1");
    copy.restore("p1");
    expect(computeEdits(copy)).toEqual([]);
  });
});

describe("computeEdits", () => {
  it("empty edit set for an untouched gate", () => {
    const copy = new WorkingCopy(envelope("B", [{ question_id: "q1", text: "Is the research paper x?" }]));
    expect(computeEdits(copy)).toEqual([]);
  });

  it("emits delete ops for removed items", () => {
    const copy = new WorkingCopy(envelope("C", [{ verdict_id: "v1" }, { verdict_id: "v2" }]));
    copy.markDeleted("v1");
    expect(computeEdits(copy)).toEqual([{ op: "delete", item_id: "v1" }]);
  });

  it("emits only changed fields for updates", () => {
    const copy = new WorkingCopy(envelope("D", [
      { gap_id: "g1", text: "gap text", selected: false },
      { gap_id: "g2", text: "other", selected: false },
    ]));
    copy.setField("g1", "selected", true);
    expect(computeEdits(copy)).toEqual([
      { op: "update", item_id: "g1", fields: { selected: true } },
    ]);
  });

  it("reverting a field change emits nothing", () => {
    const copy = new WorkingCopy(envelope("H", [{ method_id: "m1", accepted: true, text: "t" }]));
    copy.setField("m1", "accepted", false);
    copy.setField("m1", "accepted", true);
    expect(computeEdits(copy)).toEqual([]);
  });

  it("emits add ops with the entered data", () => {
    const copy = new WorkingCopy(envelope("A", [{ paper_id: "p1" }]));
    copy.addItem({ paper_id: "manual", title: "Hand picked" });
    expect(computeEdits(copy)).toEqual([
      { op: "add", item: { paper_id: "manual", title: "Hand picked" } },
    ]);
  });

  it("an added item deleted before submit vanishes", () => {
    const copy = new WorkingCopy(envelope("A", []));
    const item = copy.addItem({ paper_id: "oops" });
    copy.markDeleted(item.id);
    expect(computeEdits(copy)).toEqual([]);
  });

  it("gate F problem statement update only when changed", () => {
    const copy = new WorkingCopy(envelope("F", [], { problem_statement: "original" }));
    copy.problemStatement = "original";
    expect(computeEdits(copy)).toEqual([]);
    copy.problemStatement = "sharper";
    expect(computeEdits(copy)).toEqual([
      { op: "update", item_id: "problem_statement", fields: { text: "sharper" } },
    ]);
  });

  it("edit fidelity: ops equal the visible final state, order-independent of clicks", () => {
    const copy = new WorkingCopy(envelope("G", [
      { evidence_id: "e1", accepted: true },
      { evidence_id: "e2", accepted: true },
      { evidence_id: "e3", accepted: true },
    ]));
    // a meandering editing session that lands on: e1 rejected, e2 deleted
    copy.setField("e2", "accepted", false);
    copy.markDeleted("e3");
    copy.restore("e3");
    copy.setField("e2", "accepted", true);
    copy.markDeleted("e2");
    copy.setField("e1", "accepted", false);
    expect(computeEdits(copy)).toEqual([
      { op: "update", item_id: "e1", fields: { accepted: false } },
      { op: "delete", item_id: "e2" },
    ]);
  });
});

describe("buildSubmission", () => {
  it("decision gates carry decision and optional edits", () => {
    const copy = new WorkingCopy(envelope("E", [], {
      current: { title: "t", abstract: "a", version: 0 },
      candidate: { title: "t", abstract: "b", version: 1 },
      diff: [],
    }));
    copy.decision = "accept";
    copy.editedAbstract = "polished";
    expect(buildSubmission(copy)).toEqual({
      edits: [],
      decision: "accept",
      edited_title: null,
      edited_abstract: "polished",
    });
  });

  it("item gates omit decision entirely", () => {
    const copy = new WorkingCopy(envelope("B", [{ question_id: "q1", text: "Is the research paper x?" }]));
    expect(buildSubmission(copy)).toEqual({ edits: [] });
  });
});
