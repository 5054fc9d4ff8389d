"""Dataset export: user-validated triples mined from session logs.

Each record is (input, agent_output, researcher_validated_output) for one of
four task framings. Everything is derived by folding the log, so exports
never disagree with replay; items deleted before their gate resolved are
never exported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ideagate.agents.parsing import parse_binary_answer
from ideagate.errors import PreconditionError
from ideagate.session.store import LogEvent
from ideagate.workflow import model as m
from ideagate.workflow import reducer
from ideagate.workflow.model import SessionState

EXPORT_TASKS = ("motivation-retrieval", "proposal-rewrite", "problem-retrieval", "method-synthesis")


@dataclass
class _Pass:
    proposal: dict
    questions: list[dict]
    verdicts: list[dict]
    kept_ids: list[str] | None = None
    resolved: bool = False


@dataclass
class _Rewrite:
    prior: dict
    selected_gaps: list[str]
    candidate: dict
    final: dict | None = None
    accepted: bool = False
    resolved: bool = False


@dataclass
class _Mined:
    state: SessionState
    passes: list[_Pass] = field(default_factory=list)
    rewrites: list[_Rewrite] = field(default_factory=list)
    evidence_pairs: list[dict] = field(default_factory=list)  # P10 call/outcome pairs
    problem_texts: dict = field(default_factory=dict)
    evidence_final: list[dict] | None = None
    synthesis: dict | None = None


def _mine(session_id: str, events: list[LogEvent]) -> _Mined:
    mined = _Mined(state=SessionState(session_id=session_id))
    open_calls: dict[str, dict] = {}

    for event in events:
        state = mined.state
        if event.kind == "llm-call" and event.payload.get("template_id") == "P10":
            ctx = event.payload.get("context", {})
            key = f"{ctx.get('problem_id')}::{ctx.get('paper_id')}"
            open_calls[key] = {"problem_id": ctx.get("problem_id"), "paper_id": ctx.get("paper_id")}
        elif event.kind == "llm-response" and event.payload.get("template_id") == "P10":
            ctx = event.payload.get("context", {})
            key = f"{ctx.get('problem_id')}::{ctx.get('paper_id')}"
            pair = open_calls.pop(key, None)
            if pair is not None:
                answer = parse_binary_answer(event.payload.get("raw", ""))
                pair["verdict"] = answer.verdict
                pair["methodology_text"] = answer.justification
                mined.evidence_pairs.append(pair)
        elif event.kind == "error" and event.payload.get("template_id") == "P10":
            ctx = event.payload.get("context", {})
            key = f"{ctx.get('problem_id')}::{ctx.get('paper_id')}"
            pair = open_calls.pop(key, None)
            if pair is not None:
                pair["verdict"] = "Unanswerable"
                pair["methodology_text"] = None
                pair["error"] = event.payload.get("detail")
                mined.evidence_pairs.append(pair)
        elif event.kind == "gate-edit":
            pending = state.pending_gate or {}
            if pending.get("kind") == "E" and mined.rewrites:
                rewrite = mined.rewrites[-1]
                decision = event.payload.get("decision")
                rewrite.resolved = True
                rewrite.accepted = decision in ("accept", "iterate")

        next_state = reducer.apply_event(state, event.kind, event.payload, event.actor)

        if event.kind == "gate-edit":
            if mined.rewrites and mined.rewrites[-1].resolved and mined.rewrites[-1].accepted \
                    and mined.rewrites[-1].final is None:
                mined.rewrites[-1].final = next_state.proposals[-1]
        elif event.kind == "state-transition":
            dst = event.payload.get("to")
            if dst in (m.GATE_C, m.MV_VALIDATED) and "verdicts" in event.payload:
                mined.passes.append(_Pass(
                    proposal=dict(state.proposals[-1]) if state.proposals else {},
                    questions=[dict(q) for q in state.questions],
                    verdicts=[dict(v) for v in event.payload["verdicts"]],
                ))
                if dst == m.MV_VALIDATED:
                    mined.passes[-1].kept_ids = []
                    mined.passes[-1].resolved = True
            elif dst == m.MV_VALIDATED and mined.passes and not mined.passes[-1].resolved:
                mined.passes[-1].kept_ids = []
                mined.passes[-1].resolved = True
            elif dst == m.MV_GAPS and mined.passes and not mined.passes[-1].resolved:
                mined.passes[-1].kept_ids = list(next_state.kept_verdict_ids)
                mined.passes[-1].resolved = True
            elif dst == m.MV_REWRITTEN:
                mined.rewrites.append(_Rewrite(
                    prior=dict(state.proposals[-1]),
                    selected_gaps=[g["text"] for g in state.gaps if g.get("selected")],
                    candidate=dict(event.payload.get("candidate", {})),
                ))
            elif dst == m.GATE_F:
                mined.problem_texts = {p["problem_id"]: p["text"] for p in next_state.problems}
            elif dst == m.MS_SYNTH:
                mined.synthesis = {
                    "problem_statement": next_state.problem_statement,
                    "evidence_in": [dict(e) for e in state.evidence if e.get("accepted")],
                    "methods_out": [dict(x) for x in event.payload.get("methods", [])],
                    "validated": None,
                }
                mined.evidence_final = [dict(e) for e in state.evidence]
            elif dst == m.MS_REWRITTEN and mined.synthesis is not None:
                mined.synthesis["validated"] = [
                    dict(x) for x in state.methods if x.get("accepted")
                ]
            elif dst == m.GATE_F and not mined.problem_texts:
                pass

        mined.state = next_state
    return mined


def export_dataset(session_id: str, events: list[LogEvent], task: str) -> tuple[list[dict], str | None]:
    """Return (records, notice). Unfinished sessions export nothing."""
    if task not in EXPORT_TASKS:
        raise PreconditionError(f"unknown export task {task!r}; expected one of {EXPORT_TASKS}")
    mined = _mine(session_id, events)
    if mined.state.state not in (m.DONE, m.MV_VALIDATED):
        return [], f"session {session_id!r} is unfinished (state {mined.state.state!r}); nothing exported"

    records: list[dict] = []
    if task == "motivation-retrieval":
        for p in mined.passes:
            if not p.resolved:
                continue
            kept = set(p.kept_ids or [])
            question_text = {q["question_id"]: q["text"] for q in p.questions}
            for v in p.verdicts:
                label = "yes" if (v["verdict"] == "Yes" and v["verdict_id"] in kept) else "no"
                records.append({
                    "task": task,
                    "input": {
                        "proposal": p.proposal,
                        "question": question_text.get(v["question_id"], ""),
                        "paper_id": v["paper_id"],
                    },
                    "agent_output": {
                        "verdict": v["verdict"],
                        "justification": v.get("justification"),
                    },
                    "researcher_validated_output": {"label": label},
                })
    elif task == "proposal-rewrite":
        for r in mined.rewrites:
            if not (r.resolved and r.accepted and r.final):
                continue
            records.append({
                "task": task,
                "input": {"proposal": r.prior, "selected_gaps": r.selected_gaps},
                "agent_output": {"abstract": r.candidate.get("abstract", "")},
                "researcher_validated_output": {"proposal": r.final},
            })
    elif task == "problem-retrieval":
        if mined.evidence_final is not None:
            accepted = {
                (e["problem_id"], e["paper_id"])
                for e in mined.evidence_final
                if e.get("accepted")
            }
            for pair in mined.evidence_pairs:
                key = (pair["problem_id"], pair["paper_id"])
                records.append({
                    "task": task,
                    "input": {
                        "problem": mined.problem_texts.get(pair["problem_id"], ""),
                        "paper_id": pair["paper_id"],
                    },
                    "agent_output": {
                        "verdict": pair.get("verdict"),
                        "methodology_text": pair.get("methodology_text"),
                    },
                    "researcher_validated_output": {"label": "yes" if key in accepted else "no"},
                })
    elif task == "method-synthesis":
        if mined.synthesis is not None and mined.synthesis.get("validated") is not None:
            records.append({
                "task": task,
                "input": {
                    "problem": mined.synthesis["problem_statement"],
                    "evidence": mined.synthesis["evidence_in"],
                },
                "agent_output": {"methods": mined.synthesis["methods_out"]},
                "researcher_validated_output": {"methods": mined.synthesis["validated"]},
            })

    notice = None if records else f"no {task} records in session {session_id!r}"
    return records, notice
