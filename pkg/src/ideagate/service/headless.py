"""Headless workflow execution: scripted provider + scripted gate decisions.

Runs a full workflow non-interactively and writes the final proposal, all
verdicts, the session log, and a state snapshot into the output directory.
Exit codes: 0 success, 2 fixture miss, 3 missing gate decision, 1 anything
else. Stderr carries the missing key on fixture misses.
"""

from __future__ import annotations

import json
import shutil
import sys
import uuid
from pathlib import Path

from ideagate.agents.providers import HashEmbeddingProvider, HttpEmbeddingProvider
from ideagate.agents.runtime import AgentRuntime, PersonaConfig
from ideagate.corpus.index import CorpusIndex
from ideagate.corpus.records import read_corpus_file
from ideagate.errors import FixtureMiss, IdeagateError
from ideagate.service.config import ServiceConfig
from ideagate.service.scripted import RunScript, ScriptedChatProvider
from ideagate.session.store import SessionStore, canonical_json
from ideagate.workflow import model as m
from ideagate.workflow.engine import WorkflowEngine
from ideagate.workflow.model import Proposal

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FIXTURE_MISS = 2
EXIT_MISSING_GATE = 3


def build_embedder(config: ServiceConfig):
    spec = config.embedding
    if spec.type == "hash":
        return HashEmbeddingProvider(spec.dimension, spec.model_id)
    return HttpEmbeddingProvider(
        endpoint=spec.endpoint,
        model_id=spec.model_id or "remote",
        dimension=spec.dimension,
        api_key_env=spec.api_key_env,
        timeout_s=spec.timeout_s,
    )


def build_corpus(config: ServiceConfig, embedder, corpus_path: str | None = None):
    index = CorpusIndex()
    path = corpus_path or config.corpus_path
    report = None
    if path:
        read = read_corpus_file(path)
        report = index.ingest_corpus(read.records, embedder)
        report.reasons = read.problems + report.reasons
        report.skipped += len(read.problems)
    return index, report, (Path(path).parent if path else None)


def load_proposal(path: str | Path) -> Proposal:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return Proposal(title=data["title"], abstract=data["abstract"])


class HeadlessRun:
    """Drives one engine to completion using a RunScript."""

    def __init__(
        self,
        config: ServiceConfig,
        script: RunScript,
        corpus: CorpusIndex,
        corpus_dir: Path | None,
        store: SessionStore,
        session_id: str | None = None,
    ):
        self.script = script
        provider = ScriptedChatProvider(script.fixtures)
        personas = {
            "colleague": PersonaConfig(
                persona="colleague",
                provider_id="scripted",
                model_name=config.personas["colleague"].model_name,
                temperature=config.personas["colleague"].temperature,
            ),
            "mentor": PersonaConfig(
                persona="mentor",
                provider_id="scripted",
                model_name=config.personas["mentor"].model_name,
                temperature=config.personas["mentor"].temperature,
            ),
        }
        runtime = AgentRuntime(
            {"scripted": provider},
            personas,
            call_budget=config.engine.call_budget,
            backoff_base_s=0.0,
        )
        embedder = build_embedder(config)
        self.engine = WorkflowEngine(
            session_id=session_id or f"run-{uuid.uuid4().hex[:8]}",
            store=store,
            corpus=corpus,
            runtime=runtime,
            embedder=embedder,
            config=config.engine,
            corpus_dir=corpus_dir,
        )

    def execute(self, proposal: Proposal, k_papers: int | None = None) -> None:
        engine = self.engine
        engine.start_motivation_validation(proposal, k_papers)
        started_ms = False
        while True:
            state = engine.state
            if state.state == m.DONE:
                return
            if state.state == m.MV_VALIDATED:
                if self.script.method_synthesis and not started_ms:
                    started_ms = True
                    engine.start_method_synthesis()
                    continue
                return
            envelope = engine.pending_gate()
            if envelope is None:
                raise IdeagateError(f"stuck without a pending gate in state {state.state!r}")
            kind = envelope["kind"]
            decision = self.script.next_decision(kind)
            if decision is None:
                raise MissingGateDecision(kind)
            engine.apply_gate_edits(
                envelope["gate_id"],
                edits=decision.edits,
                decision=decision.decision,
                edited_title=decision.edited_title,
                edited_abstract=decision.edited_abstract,
            )


class MissingGateDecision(IdeagateError):
    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"script supplies no decision for gate {kind!r}")


def run_headless(
    proposal_path: str,
    script_path: str,
    out_dir: str,
    config: ServiceConfig,
    corpus_path: str | None = None,
    k_papers: int | None = None,
    stderr=None,
) -> int:
    """Execute a scripted run end to end and write artifacts to out_dir."""
    stderr = stderr if stderr is not None else sys.stderr
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        proposal = load_proposal(proposal_path)
        script = RunScript.load(script_path)
        embedder = build_embedder(config)
        corpus, _, corpus_dir = build_corpus(config, embedder, corpus_path)
        store = SessionStore(out / "sessions", durable=False)
        run = HeadlessRun(config, script, corpus, corpus_dir, store)
        run.execute(proposal, k_papers)
    except FixtureMiss as exc:
        print(f"fixture miss: {exc}", file=stderr)
        return EXIT_FIXTURE_MISS
    except MissingGateDecision as exc:
        print(f"script error: {exc}", file=stderr)
        return EXIT_MISSING_GATE
    except IdeagateError as exc:
        print(f"run failed: {exc}", file=stderr)
        return EXIT_ERROR

    state = run.engine.state
    session_id = run.engine.session_id
    (out / "final_proposal.json").write_text(
        json.dumps(state.proposals[-1] if state.proposals else None, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    with open(out / "verdicts.jsonl", "w", encoding="utf-8") as fh:
        for v in state.verdicts:
            fh.write(canonical_json(v) + "\n")
    (out / "state.json").write_text(canonical_json(state.to_dict()) + "\n", encoding="utf-8")
    shutil.copyfile(out / "sessions" / f"{session_id}.jsonl", out / "session_log.jsonl")
    (out / "session_id.txt").write_text(session_id + "\n", encoding="utf-8")
    return EXIT_OK
