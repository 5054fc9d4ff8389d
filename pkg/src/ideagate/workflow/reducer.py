"""Pure fold of log events into SessionState.

The engine validates every event against this reducer before persisting it,
and replay folds the stored log through the same code, so live state and
replayed state cannot diverge. Illegal transitions raise TransitionError;
invalid gate submissions raise GateRejected, always before any mutation has
been persisted.

Gate-edit events store the researcher's raw edit operations, not their
result: applying them here is what makes the log the single source of truth.
"""

from __future__ import annotations

import copy

from ideagate.errors import GateRejected, TransitionError
from ideagate.workflow import model as m
from ideagate.workflow.model import SessionState


def apply_event(state: SessionState, kind: str, payload: dict, actor: str = "system") -> SessionState:
    """Return the state after one event. The input state is not mutated."""
    state = copy.deepcopy(state)
    if kind == "state-transition":
        _apply_transition(state, payload)
    elif kind == "gate-open":
        _apply_gate_open(state, payload)
    elif kind == "gate-edit":
        _apply_gate_edit(state, payload)
    elif kind == "llm-call":
        state.llm_calls += 1
    elif kind == "llm-response":
        state.llm_outcomes += 1
    elif kind == "error":
        if payload.get("for_call"):
            state.llm_outcomes += 1
    else:
        raise TransitionError(f"unknown event kind {kind!r}")
    return state


def replay(session_id: str, events) -> SessionState:
    """Fold an event sequence from scratch."""
    state = SessionState(session_id=session_id)
    for event in events:
        state = apply_event(state, event.kind, event.payload, event.actor)
    return state


# ----------------------------------------------------------------------
# transitions
# ----------------------------------------------------------------------

def _apply_transition(state: SessionState, payload: dict) -> None:
    src = payload.get("from")
    dst = payload.get("to")
    if src != state.state:
        raise TransitionError(f"transition claims source {src!r} but state is {state.state!r}")
    if state.state is None:
        if dst != m.MV_START:
            raise TransitionError(f"first transition must enter {m.MV_START!r}, got {dst!r}")
    elif (src, dst) not in m.TRANSITIONS:
        raise TransitionError(f"illegal transition {src!r} -> {dst!r}")
    state.state = dst

    if dst == m.MV_START:
        state.config = payload.get("config", {})
        state.session_id = payload.get("session_id", state.session_id)
    elif dst == m.MV_RETRIEVED:
        if "proposal" in payload:
            state.proposals = [payload["proposal"]]
        state.loop_count = int(payload.get("loop_count", 0))
        state.hits = payload.get("hits", [])
        # a fresh validation pass invalidates the previous pass's artifacts
        state.accepted_papers = []
        state.indexed_counts = {}
        state.motivation = []
        state.motivation_flagged = False
        state.questions = []
        state.verdicts = []
        state.kept_verdict_ids = []
        state.gaps = []
        state.candidate = None
    elif dst == m.MV_CHUNKED:
        state.indexed_counts = payload.get("indexed", {})
    elif dst == m.MV_MOTIVATION:
        state.motivation = payload.get("bullets", [])
        state.motivation_flagged = bool(payload.get("flagged", False))
    elif dst == m.GATE_C:
        state.verdicts = payload.get("verdicts", state.verdicts)
    elif dst == m.MV_VALIDATED:
        if "verdicts" in payload:
            state.verdicts = payload["verdicts"]
        state.flags["validation_notice"] = payload.get(
            "notice", "motivation of the proposal is validated"
        )
    elif dst == m.MV_GAPS:
        state.gaps = payload.get("gaps", [])
    elif dst in (m.MV_REWRITTEN, m.MS_REWRITTEN):
        state.candidate = payload.get("candidate")
    elif dst == m.MS_PROBLEM:
        state.problem_statement = payload.get("problem_statement", "")
        state.problem_flagged = bool(payload.get("flagged", False))
    elif dst == m.MS_RELATED:
        state.problems = payload.get("problems", [])
    elif dst == m.MS_EVIDENCE:
        state.evidence = payload.get("evidence", [])
        state.evidence_retrieval = payload.get("retrieval", {})
        state.unique_evidence_papers = int(payload.get("unique_papers", 0))
    elif dst == m.MS_SYNTH:
        state.methods = payload.get("methods", [])
    elif dst == m.DONE:
        state.done_reason = payload.get("reason")
        for key, value in payload.get("flags", {}).items():
            state.flags[key] = value


# ----------------------------------------------------------------------
# gate open
# ----------------------------------------------------------------------

def _apply_gate_open(state: SessionState, payload: dict) -> None:
    envelope = payload.get("envelope")
    if not isinstance(envelope, dict):
        raise TransitionError("gate-open without envelope")
    kind = envelope.get("kind")
    expected_state = m.GATE_STATES.get(kind)
    if expected_state is None or state.state != expected_state:
        raise TransitionError(
            f"gate {kind!r} cannot open in state {state.state!r}"
        )
    if state.pending_gate is not None:
        raise TransitionError("a gate is already pending")
    state.pending_gate = envelope
    state.gate_seq += 1
    if kind == "A":
        for item in envelope.get("items", []):
            pid = item.get("paper_id")
            if pid and pid not in state.seen_papers:
                state.seen_papers.append(pid)
        state.hits = envelope.get("items", [])
        if not envelope.get("items"):
            state.flags["add_papers_required"] = True
    elif kind == "B":
        state.questions = list(envelope.get("items", []))
    elif kind == "D":
        state.gaps = list(envelope.get("items", []))
    elif kind == "F":
        state.problems = list(envelope.get("items", []))
    elif kind == "G":
        state.evidence = list(envelope.get("items", []))
    elif kind == "H":
        state.methods = list(envelope.get("items", []))


# ----------------------------------------------------------------------
# gate edits
# ----------------------------------------------------------------------

def _apply_gate_edit(state: SessionState, payload: dict) -> None:
    gate_id = payload.get("gate_id")
    envelope = state.pending_gate
    if envelope is None:
        raise GateRejected(f"no pending gate (submission for {gate_id!r})")
    if gate_id != envelope.get("gate_id"):
        raise GateRejected(
            f"stale gate id {gate_id!r}; pending gate is {envelope.get('gate_id')!r}"
        )
    kind = envelope["kind"]
    edits = payload.get("edits") or []
    decision = payload.get("decision")
    allowed = m.GATE_ALLOWED_OPS[kind]
    for op in edits:
        name = op.get("op")
        if name not in allowed:
            raise GateRejected(f"operation {name!r} not allowed at gate {kind}")

    if kind in ("E", "I"):
        _apply_decision_gate(state, kind, payload)
    else:
        handler = _ITEM_GATE_HANDLERS[kind]
        handler(state, envelope, edits)

    state.resolved_gates.append(envelope["gate_id"])
    state.pending_gate = None


def _find_item(items: list[dict], item_id: str, id_key: str) -> dict:
    for item in items:
        if item.get(id_key) == item_id:
            return item
    raise GateRejected(f"unknown item id {item_id!r}")


def _next_suffix(ids: list[str]) -> int:
    """Next free numeric suffix; survives deletions without id reuse."""
    best = 0
    for item_id in ids:
        tail = item_id.rsplit(".", 1)[-1]
        if tail.isdigit():
            best = max(best, int(tail))
    return best + 1


def _edit_gate_a(state: SessionState, envelope: dict, edits: list[dict]) -> None:
    items = [dict(i) for i in envelope.get("items", [])]
    for op in edits:
        if op["op"] == "delete":
            target = _find_item(items, op.get("item_id"), "paper_id")
            items.remove(target)
        elif op["op"] == "add":
            added = op.get("item") or {}
            pid = added.get("paper_id")
            if not pid:
                raise GateRejected("add at gate A requires a paper_id")
            if any(i.get("paper_id") == pid for i in items):
                raise GateRejected(f"paper {pid!r} already listed")
            items.append({
                "paper_id": pid,
                "title": added.get("title", ""),
                "abstract": added.get("abstract", ""),
                "score": None,
                "rank": None,
                "relevance": added.get("relevance", ""),
                "previously_seen": pid in state.seen_papers,
                "added_by_researcher": True,
            })
            if pid not in state.seen_papers:
                state.seen_papers.append(pid)
        else:
            raise GateRejected(f"operation {op['op']!r} not allowed at gate A")
    state.hits = items
    state.accepted_papers = [i["paper_id"] for i in items]


def _validated_question_text(op: dict) -> str:
    text = (op.get("fields") or {}).get("text") if op.get("op") == "update" else (op.get("item") or {}).get("text")
    if not text or not text.strip():
        raise GateRejected("question text must be non-empty")
    text = text.strip()
    if not text.startswith(m.QUESTION_PREFIX):
        raise GateRejected(
            f"question must begin with {m.QUESTION_PREFIX!r}: {text[:60]!r}"
        )
    return text


def _edit_gate_b(state: SessionState, envelope: dict, edits: list[dict]) -> None:
    questions = [dict(q) for q in state.questions]
    next_no = _next_suffix([q["question_id"] for q in questions])
    for op in edits:
        if op["op"] == "delete":
            target = _find_item(questions, op.get("item_id"), "question_id")
            target["status"] = "deleted"
        elif op["op"] == "update":
            target = _find_item(questions, op.get("item_id"), "question_id")
            if target["status"] == "deleted":
                raise GateRejected(f"question {target['question_id']!r} was deleted")
            target["text"] = _validated_question_text(op)
            target["status"] = "edited"
        elif op["op"] == "add":
            text = _validated_question_text(op)
            questions.append({
                "question_id": f"q{state.loop_count}.{next_no}",
                "text": text,
                "source_motivation_bullet": "",
                "status": "added",
            })
            next_no += 1
    state.questions = questions


def _edit_gate_c(state: SessionState, envelope: dict, edits: list[dict]) -> None:
    items = [dict(i) for i in envelope.get("items", [])]
    for op in edits:
        target = _find_item(items, op.get("item_id"), "verdict_id")
        items.remove(target)
    state.kept_verdict_ids = [i["verdict_id"] for i in items]


def _edit_gate_d(state: SessionState, envelope: dict, edits: list[dict]) -> None:
    gaps = [dict(g) for g in state.gaps]
    next_no = _next_suffix([g["gap_id"] for g in gaps])
    for op in edits:
        if op["op"] == "delete":
            target = _find_item(gaps, op.get("item_id"), "gap_id")
            gaps.remove(target)
        elif op["op"] == "update":
            target = _find_item(gaps, op.get("item_id"), "gap_id")
            fields = op.get("fields") or {}
            if "selected" in fields:
                target["selected"] = bool(fields["selected"])
            if "text" in fields:
                if not str(fields["text"]).strip():
                    raise GateRejected("gap text must be non-empty")
                target["text"] = str(fields["text"]).strip()
        elif op["op"] == "add":
            item = op.get("item") or {}
            text = str(item.get("text", "")).strip()
            if not text:
                raise GateRejected("add at gate D requires text")
            gaps.append({
                "gap_id": f"gap{state.loop_count}.{next_no}",
                "paper_id": str(item.get("paper_id", "")),
                "text": text,
                "origin": "researcher",
                "selected": True,
            })
            next_no += 1
    state.gaps = gaps


def _edit_gate_f(state: SessionState, envelope: dict, edits: list[dict]) -> None:
    problems = [dict(p) for p in state.problems]
    next_no = _next_suffix([p["problem_id"] for p in problems])
    for op in edits:
        item_id = op.get("item_id")
        if op["op"] == "update" and item_id == "problem_statement":
            text = (op.get("fields") or {}).get("text", "")
            if not str(text).strip():
                raise GateRejected("problem statement must be non-empty")
            state.problem_statement = str(text).strip()
            state.problem_flagged = False
            continue
        if op["op"] == "delete":
            target = _find_item(problems, item_id, "problem_id")
            target["status"] = "deleted"
        elif op["op"] == "update":
            target = _find_item(problems, item_id, "problem_id")
            if target["status"] == "deleted":
                raise GateRejected(f"problem {item_id!r} was deleted")
            fields = op.get("fields") or {}
            text = str(fields.get("text", "")).strip()
            if not text:
                raise GateRejected("problem text must be non-empty")
            target["text"] = text
            target["status"] = "edited"
        elif op["op"] == "add":
            item = op.get("item") or {}
            text = str(item.get("text", "")).strip()
            kind = item.get("kind", "similar")
            if not text:
                raise GateRejected("add at gate F requires text")
            if kind not in ("similar", "subtask"):
                raise GateRejected(f"unknown problem kind {kind!r}")
            problems.append({
                "problem_id": f"prob.{next_no}",
                "kind": kind,
                "text": text,
                "status": "added",
            })
            next_no += 1
    state.problems = problems


def _edit_gate_g(state: SessionState, envelope: dict, edits: list[dict]) -> None:
    evidence = [dict(e) for e in state.evidence]
    for op in edits:
        target = _find_item(evidence, op.get("item_id"), "evidence_id")
        if op["op"] == "delete":
            evidence.remove(target)
        elif op["op"] == "update":
            fields = op.get("fields") or {}
            if "accepted" in fields:
                target["accepted"] = bool(fields["accepted"])
            if "methodology_text" in fields:
                text = str(fields["methodology_text"]).strip()
                if not text:
                    raise GateRejected("methodology text must be non-empty")
                target["methodology_text"] = text
    state.evidence = evidence


def _edit_gate_h(state: SessionState, envelope: dict, edits: list[dict]) -> None:
    methods = [dict(x) for x in state.methods]
    for op in edits:
        target = _find_item(methods, op.get("item_id"), "method_id")
        if op["op"] == "delete":
            methods.remove(target)
        elif op["op"] == "update":
            fields = op.get("fields") or {}
            if "accepted" in fields:
                target["accepted"] = bool(fields["accepted"])
            if "text" in fields:
                text = str(fields["text"]).strip()
                if not text:
                    raise GateRejected("method text must be non-empty")
                target["text"] = text
    state.methods = methods


_ITEM_GATE_HANDLERS = {
    "A": _edit_gate_a,
    "B": _edit_gate_b,
    "C": _edit_gate_c,
    "D": _edit_gate_d,
    "F": _edit_gate_f,
    "G": _edit_gate_g,
    "H": _edit_gate_h,
}


def _apply_decision_gate(state: SessionState, kind: str, payload: dict) -> None:
    decision = payload.get("decision")
    valid = ("accept", "iterate", "reject") if kind == "E" else ("accept", "reject")
    if decision not in valid:
        raise GateRejected(f"gate {kind} requires a decision in {valid}")
    if decision == "reject":
        state.candidate = None
        return
    candidate = state.candidate
    if candidate is None:
        raise GateRejected("no candidate proposal to accept")
    state.proposals.append(candidate)
    state.candidate = None
    edited_title = payload.get("edited_title")
    edited_abstract = payload.get("edited_abstract")
    if edited_title or edited_abstract:
        edited = {
            "title": edited_title or candidate["title"],
            "abstract": edited_abstract or candidate["abstract"],
            "version": candidate["version"] + 1,
            "provenance": m.PROVENANCE_RESEARCHER,
        }
        if not edited["title"].strip() or not edited["abstract"].strip():
            raise GateRejected("edited proposal must keep non-empty title and abstract")
        state.proposals.append(edited)
