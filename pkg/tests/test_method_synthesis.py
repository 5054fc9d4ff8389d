"""Method synthesis workflow: problems, evidence gathering, synthesis, rewrite."""

from __future__ import annotations

import pytest

from ideagate.corpus.index import CorpusIndex
from ideagate.corpus.records import PaperRecord
from ideagate.errors import GateRejected, PreconditionError
from ideagate.service.scripted import Fixture
from ideagate.session.store import canonical_json
from ideagate.workflow import model as m
from ideagate.workflow import reducer
from ideagate.workflow.engine import EngineConfig
from ideagate.workflow.model import Proposal

from conftest import make_engine

PROBLEM = "design a reference free metric for retrieval augmented question answering"
SIMILAR_1 = "parrot parrot parrot metric evaluation"
SIMILAR_2 = "blorf blorf blorf metric evaluation"
SUBTASK_1 = "wibble wibble wibble answer scoring"


def ms_corpus(embedder) -> CorpusIndex:
    """Six seed docs for the validation pass plus nine coined-vocabulary docs
    that only the related-problem queries can reach."""
    records = [
        PaperRecord(paper_id=f"seed{i}", title=f"question answering metric study {i}",
                    abstract=f"evaluating answers and retrieval number {i}")
        for i in range(6)
    ]
    coined = [
        ("mp0", "parrot parrot parrot archive zero"),
        ("mp1", "parrot parrot parrot archive one"),
        ("mp2", "blorf blorf blorf archive two"),
        ("mp3", "blorf blorf blorf archive three"),
        ("mp4", "wibble wibble wibble archive four"),
        ("mp5", "wibble wibble wibble archive five"),
        ("mp6", "parrot parrot parrot blorf blorf blorf shared"),
        ("mp7", "wibble wibble wibble archive seven"),
        ("mp8", "quiet filler text eight"),
    ]
    records += [
        PaperRecord(paper_id=pid, title=text, abstract=f"{text} details")
        for pid, text in coined
    ]
    index = CorpusIndex()
    index.ingest_corpus(records, embedder)
    return index


def ms_fixtures() -> list[Fixture]:
    return [
        Fixture(template="PX-relevance", response="Related work."),
        Fixture(template="P1", response="- no reference free metric exists"),
        Fixture(template="P2", response="- Is the research paper proposing a reference free metric?"),
        Fixture(template="P3", response="No"),
        Fixture(template="P6", response=PROBLEM),
        Fixture(template="P7", response=f"- {SIMILAR_1}\n- {SIMILAR_2}"),
        Fixture(template="P8", response=f"- {SUBTASK_1}"),
        Fixture(template="P9", match_all=("parrot",),
                response="Is the research paper proposing an approach or method to solve parrot tasks?"),
        Fixture(template="P9", match_all=("blorf",),
                response="Is the research paper proposing an approach or method to solve blorf tasks?"),
        Fixture(template="P9", match_all=("wibble",),
                response="Is the research paper proposing an approach or method to solve wibble tasks?"),
        Fixture(template="P10", match_all=("parrot tasks", "archive zero"),
                response="Yes. Uses transformer encoders to score answer similarity."),
        Fixture(template="P10", match_all=("parrot tasks", "shared"),
                response="Yes. Applies probabilistic informedness measures."),
        Fixture(template="P10", match_all=("wibble tasks", "archive four"),
                response="Yes. Trains a judge model on preference data."),
        Fixture(template="P10", response="No"),
        Fixture(template="P11", response="- method alpha built on encoders\n- method beta from measures\n- method gamma judge-based"),
        Fixture(template="PX-method-rewrite",
                response="Final proposal including encoder scoring and judge models."),
    ]


def qa_proposal() -> Proposal:
    return Proposal(
        title="Reference free evaluation metric",
        abstract="questions with long answers lack unique references so we propose a reference free metric",
    )


def run_to_validated(tmp_path, embedder, fixtures=None, config=None):
    corpus = ms_corpus(embedder)
    engine, store, provider = make_engine(
        tmp_path, corpus, embedder, fixtures or ms_fixtures(),
        config=config or EngineConfig(k_papers=6, k_small=3, k_per_problem=3),
    )
    engine.start_motivation_validation(qa_proposal())
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"])
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"])
    assert engine.state.state == m.MV_VALIDATED
    return engine, store


def run_to_gate_f(tmp_path, embedder, **kwargs):
    engine, store = run_to_validated(tmp_path, embedder, **kwargs)
    engine.start_method_synthesis()
    assert engine.state.state == m.GATE_F
    return engine, store


def run_to_gate_g(tmp_path, embedder, **kwargs):
    engine, store = run_to_gate_f(tmp_path, embedder, **kwargs)
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"])
    assert engine.state.state == m.GATE_G
    return engine, store


def test_ms_requires_validated_state(tmp_path, embedder):
    corpus = ms_corpus(embedder)
    engine, _, _ = make_engine(tmp_path, corpus, embedder, ms_fixtures())
    with pytest.raises(PreconditionError):
        engine.start_method_synthesis()


def test_problem_and_related_generated(tmp_path, embedder):
    engine, _ = run_to_gate_f(tmp_path, embedder)
    assert engine.state.problem_statement == PROBLEM
    kinds = [(p["kind"], p["text"]) for p in engine.state.problems]
    assert kinds == [("similar", SIMILAR_1), ("similar", SIMILAR_2), ("subtask", SUBTASK_1)]
    assert engine.state.pending_gate["payload"]["problem_statement"] == PROBLEM


def test_gate_f_problem_statement_editable(tmp_path, embedder):
    engine, _ = run_to_gate_f(tmp_path, embedder)
    gate = engine.state.pending_gate
    engine.apply_gate_edits(gate["gate_id"], edits=[
        {"op": "update", "item_id": "problem_statement", "fields": {"text": PROBLEM + " precisely"}},
    ])
    assert engine.state.problem_statement == PROBLEM + " precisely"


def test_deleted_problem_generates_no_queries(tmp_path, embedder):
    engine, store = run_to_gate_f(tmp_path, embedder)
    gate = engine.state.pending_gate
    doomed = gate["items"][1]["problem_id"]  # SIMILAR_2 / blorf
    engine.apply_gate_edits(gate["gate_id"], edits=[{"op": "delete", "item_id": doomed}])
    assert doomed not in engine.state.evidence_retrieval
    asked = {
        e.payload["context"]["problem_id"]
        for e in store.read_events("t")
        if e.kind == "llm-call" and e.payload["template_id"] == "P9"
    }
    assert doomed not in asked


def test_evidence_retrieval_dedupe(tmp_path, embedder):
    engine, _ = run_to_gate_g(tmp_path, embedder)
    retrieval = engine.state.evidence_retrieval
    assert all(len(v) == 3 for v in retrieval.values())
    total_slots = sum(len(v) for v in retrieval.values())
    assert total_slots == 9
    assert engine.state.unique_evidence_papers == len(
        {pid for pids in retrieval.values() for pid in pids}
    )
    assert engine.state.unique_evidence_papers < total_slots  # overlap existed


def test_evidence_only_from_yes(tmp_path, embedder):
    engine, _ = run_to_gate_g(tmp_path, embedder)
    evidence = engine.state.evidence
    assert {e["evidence_id"] for e in evidence} == {
        "ev.prob.1.mp0", "ev.prob.1.mp6", "ev.prob.3.mp4",
    }
    assert all(e["accepted"] for e in evidence)
    assert all(e["methodology_text"] for e in evidence)


def test_synthesis_with_pruned_evidence(tmp_path, embedder):
    engine, _ = run_to_gate_g(tmp_path, embedder)
    gate = engine.state.pending_gate
    engine.apply_gate_edits(gate["gate_id"], edits=[
        {"op": "update", "item_id": "ev.prob.1.mp6", "fields": {"accepted": False}},
    ])
    assert engine.state.state == m.GATE_H
    methods = engine.state.methods
    assert len(methods) == 3
    for x in methods:
        assert set(x["evidence_ids"]) == {"ev.prob.1.mp0", "ev.prob.3.mp4"}


def test_parametric_only_synthesis(tmp_path, embedder):
    engine, _ = run_to_gate_g(tmp_path, embedder)
    gate = engine.state.pending_gate
    edits = [
        {"op": "update", "item_id": e["evidence_id"], "fields": {"accepted": False}}
        for e in gate["items"]
    ]
    engine.apply_gate_edits(gate["gate_id"], edits=edits)
    assert engine.state.state == m.GATE_H
    assert all(x["evidence_ids"] == [] for x in engine.state.methods)


def test_gate_h_requires_accepted_method(tmp_path, embedder):
    engine, _ = run_to_gate_g(tmp_path, embedder)
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"])
    gate = engine.state.pending_gate
    with pytest.raises(GateRejected, match="accepted method"):
        engine.apply_gate_edits(gate["gate_id"], edits=[
            {"op": "update", "item_id": x["method_id"], "fields": {"accepted": False}}
            for x in gate["items"]
        ])


def full_ms_run(tmp_path, embedder, final_decision="accept"):
    engine, store = run_to_gate_g(tmp_path, embedder)
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"])  # G: keep all
    gate = engine.state.pending_gate  # H
    engine.apply_gate_edits(gate["gate_id"], edits=[
        {"op": "update", "item_id": "m.2", "fields": {"accepted": False}},
    ])
    assert engine.state.state == m.GATE_I
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"], decision=final_decision)
    return engine, store


def test_full_ms_accept_done(tmp_path, embedder):
    engine, store = full_ms_run(tmp_path, embedder)
    assert engine.state.state == m.DONE
    assert engine.state.done_reason == "gate-i-accept"
    assert engine.state.proposals[-1]["version"] == 1
    assert "encoder scoring" in engine.state.proposals[-1]["abstract"]
    replayed = reducer.replay("t", list(store.read_events("t")))
    assert canonical_json(replayed.to_dict()) == canonical_json(engine.state.to_dict())


def test_gate_i_reject_reopens_gate_h(tmp_path, embedder):
    engine, _ = full_ms_run(tmp_path, embedder, final_decision="reject")
    assert engine.state.state == m.GATE_H
    assert engine.state.candidate is None
    assert engine.state.pending_gate["kind"] == "H"
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"])
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"], decision="accept")
    assert engine.state.state == m.DONE


def test_rewrite_with_methods_requires_acceptance(tmp_path, embedder):
    engine, _ = run_to_gate_g(tmp_path, embedder)
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"])
    with pytest.raises(PreconditionError):
        engine.rewrite_with_methods()  # wrong state: Gate H is pending
