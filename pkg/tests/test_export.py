"""Dataset export: validated triples mined from logs, gate soundness."""

from __future__ import annotations

import pytest

from ideagate.errors import PreconditionError
from ideagate.session.export import export_dataset

from test_method_synthesis import full_ms_run
from test_workflow import full_scripted_run, run_to_gate_c


def events_of(store, sid):
    return list(store.read_events(sid))


def test_unknown_task_rejected(tmp_path, embedder):
    _, store = full_scripted_run(tmp_path, embedder, "e")
    with pytest.raises(PreconditionError):
        export_dataset("e", events_of(store, "e"), "nonsense")


def test_unfinished_session_empty_with_notice(tmp_path, embedder):
    engine, store = run_to_gate_c(tmp_path, embedder)  # parked at Gate C
    records, notice = export_dataset("t", events_of(store, "t"), "motivation-retrieval")
    assert records == []
    assert "unfinished" in notice


def test_motivation_retrieval_labels(tmp_path, embedder):
    engine, store = full_scripted_run(tmp_path, embedder, "e")
    records, notice = export_dataset("e", events_of(store, "e"), "motivation-retrieval")
    assert notice is None
    assert len(records) == 10  # 1 question x 10 papers
    labels = {r["input"]["paper_id"]: r["researcher_validated_output"]["label"] for r in records}
    # two Yes verdicts, the researcher deleted the first at Gate C
    assert sorted(v for v in labels.values()) == ["no"] * 9 + ["yes"]
    assert all(r["input"]["question"].startswith("Is the research paper") for r in records)
    yes_records = [r for r in records if r["researcher_validated_output"]["label"] == "yes"]
    assert yes_records[0]["agent_output"]["verdict"] == "Yes"
    assert yes_records[0]["agent_output"]["justification"]


def test_proposal_rewrite_triple(tmp_path, embedder):
    engine, store = full_scripted_run(tmp_path, embedder, "e")
    records, notice = export_dataset("e", events_of(store, "e"), "proposal-rewrite")
    assert notice is None
    assert len(records) == 1
    triple = records[0]
    assert triple["input"]["proposal"]["version"] == 0
    assert triple["input"]["selected_gaps"]
    assert triple["agent_output"]["abstract"].startswith("Revised proposal")
    assert triple["researcher_validated_output"]["proposal"]["abstract"] == "Final edited abstract."
    assert triple["researcher_validated_output"]["proposal"]["provenance"] == "researcher-edited"


def test_problem_retrieval_pairs(tmp_path, embedder):
    engine, store = full_ms_run(tmp_path, embedder)
    records, notice = export_dataset("t", events_of(store, "t"), "problem-retrieval")
    assert notice is None
    assert len(records) == 9  # 3 problems x top-3 papers each
    yes = [r for r in records if r["researcher_validated_output"]["label"] == "yes"]
    assert {(r["input"]["paper_id"]) for r in yes} == {"mp0", "mp6", "mp4"}
    assert all(r["input"]["problem"] for r in records)


def test_method_synthesis_record(tmp_path, embedder):
    engine, store = full_ms_run(tmp_path, embedder)
    records, notice = export_dataset("t", events_of(store, "t"), "method-synthesis")
    assert notice is None
    assert len(records) == 1
    rec = records[0]
    assert rec["input"]["problem"]
    assert len(rec["input"]["evidence"]) == 3
    assert len(rec["agent_output"]["methods"]) == 3
    validated = rec["researcher_validated_output"]["methods"]
    assert [x["method_id"] for x in validated] == ["m.1", "m.3"]  # m.2 deselected


def test_export_soundness_no_deleted_items(tmp_path, embedder):
    """Deleted Gate-A papers and deleted questions never produce records."""
    from conftest import make_engine
    from test_workflow import mv_fixtures, the_proposal, workflow_corpus

    corpus = workflow_corpus(embedder)
    engine, store, _ = make_engine(tmp_path, corpus, embedder, mv_fixtures())
    engine.start_motivation_validation(the_proposal())
    gate = engine.state.pending_gate
    engine.apply_gate_edits(gate["gate_id"], edits=[
        {"op": "delete", "item_id": "wp00"},
    ])
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"])  # B
    gate = engine.state.pending_gate  # C: keep all
    engine.apply_gate_edits(gate["gate_id"])
    gate = engine.state.pending_gate  # D
    engine.apply_gate_edits(gate["gate_id"], edits=[
        {"op": "update", "item_id": gate["items"][0]["gap_id"], "fields": {"selected": True}},
    ])
    engine.apply_gate_edits(engine.state.pending_gate["gate_id"], decision="accept")
    records, _ = export_dataset("t", events_of(store, "t"), "motivation-retrieval")
    assert len(records) == 9
    assert all(r["input"]["paper_id"] != "wp00" for r in records)
