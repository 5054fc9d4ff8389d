"""HTTP service: sessions, gates, artifacts, exports, admin ingestion.

Agent steps are asynchronous: submitting a proposal or gate edits returns a
job handle immediately and the client polls /jobs/{id}. Per-session ordering
is guaranteed by the job runner; stale gate ids are rejected synchronously
with 409 so the UI can refresh at once.
"""

from __future__ import annotations

import os
import uuid
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from ideagate.agents.providers import HttpChatProvider, StaticChatProvider
from ideagate.agents.runtime import AgentRuntime, PersonaConfig
from ideagate.corpus.records import PaperRecord, read_corpus_file
from ideagate.errors import (
    ConfigError,
    GateRejected,
    IdeagateError,
    NotFound,
    PreconditionError,
)
from ideagate.service.config import ServiceConfig
from ideagate.service.headless import build_corpus, build_embedder
from ideagate.service.jobs import JobRunner
from ideagate.service.scripted import Fixture, ScriptedChatProvider
from ideagate.session.export import EXPORT_TASKS, export_dataset
from ideagate.session.store import SessionStore, canonical_json
from ideagate.workflow import model as m
from ideagate.workflow.engine import WorkflowEngine
from ideagate.workflow.model import Proposal


class ProposalBody(BaseModel):
    title: str
    abstract: str
    k_papers: int | None = None


class GateEditsBody(BaseModel):
    edits: list[dict] = Field(default_factory=list)
    decision: str | None = None
    edited_title: str | None = None
    edited_abstract: str | None = None


class CreateSessionBody(BaseModel):
    session_id: str | None = None


class IngestBody(BaseModel):
    corpus_path: str | None = None
    records: list[dict] | None = None


def build_providers(config: ServiceConfig) -> dict:
    providers = {}
    for pid, spec in config.providers.items():
        if spec.type == "http":
            providers[pid] = HttpChatProvider(
                provider_id=pid,
                endpoint=spec.endpoint,
                api_key_env=spec.api_key_env,
                timeout_s=spec.timeout_s,
                max_concurrency=spec.max_concurrency,
            )
        elif spec.type == "static":
            providers[pid] = StaticChatProvider(response=spec.response, provider_id=pid)
        else:
            provider = ScriptedChatProvider()
            if spec.fixtures_path:
                import json as _json

                data = _json.loads(Path(spec.fixtures_path).read_text(encoding="utf-8"))
                rows = data["fixtures"] if isinstance(data, dict) else data
                provider.fixtures.extend(Fixture.from_dict(d) for d in rows)
            providers[pid] = provider
    return providers


def build_runtime(config: ServiceConfig, providers: dict) -> AgentRuntime:
    personas = {
        persona: PersonaConfig(
            persona=persona,
            provider_id=spec.provider_id,
            model_name=spec.model_name,
            temperature=spec.temperature,
            max_output_tokens=spec.max_output_tokens,
        )
        for persona, spec in config.personas.items()
    }
    return AgentRuntime(providers, personas, call_budget=config.engine.call_budget)


class ServiceState:
    """Everything the endpoints share."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.embedder = build_embedder(config)
        self.corpus, self.ingest_report, self.corpus_dir = build_corpus(config, self.embedder)
        self.providers = build_providers(config)
        self.runtime = build_runtime(config, self.providers)
        self.store = SessionStore(config.store_dir)
        self.jobs = JobRunner()
        self.engines: dict[str, WorkflowEngine] = {}

    def engine(self, session_id: str) -> WorkflowEngine:
        engine = self.engines.get(session_id)
        if engine is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        return engine


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.default()
    svc = ServiceState(config)
    app = FastAPI(title="ideagate", version="0.1.0")
    app.state.svc = svc

    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def auth(request: Request) -> None:
        env = config.auth_token_env
        if not env:
            return
        expected = os.environ.get(env, "")
        header = request.headers.get("authorization", "")
        if header != f"Bearer {expected}":
            raise HTTPException(status_code=401, detail="invalid or missing token")

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "corpus_size": len(svc.corpus),
            "providers": svc.runtime.reachability(),
            "embedding_model": svc.embedder.model_id,
        }

    @app.post("/sessions", dependencies=[Depends(auth)])
    def create_session(body: CreateSessionBody):
        session_id = body.session_id or f"s-{uuid.uuid4().hex[:10]}"
        if session_id in svc.engines:
            raise HTTPException(status_code=409, detail=f"session {session_id!r} exists")
        try:
            engine = WorkflowEngine(
                session_id=session_id,
                store=svc.store,
                corpus=svc.corpus,
                runtime=svc.runtime,
                embedder=svc.embedder,
                config=svc.config.engine,
                corpus_dir=svc.corpus_dir,
            )
        except IdeagateError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        svc.engines[session_id] = engine
        return {"session_id": session_id, "state": engine.state.state}

    @app.post("/sessions/{session_id}/proposal", dependencies=[Depends(auth)])
    def submit_proposal(session_id: str, body: ProposalBody):
        engine = svc.engine(session_id)
        if engine.state.state != m.MV_START:
            raise HTTPException(status_code=409, detail=f"session already started ({engine.state.state})")
        try:
            proposal = Proposal(title=body.title, abstract=body.abstract)
        except PreconditionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        job = svc.jobs.submit(
            session_id,
            lambda: engine.start_motivation_validation(proposal, body.k_papers),
        )
        return {"job_id": job.job_id, "session_id": session_id}

    @app.get("/sessions/{session_id}/gate", dependencies=[Depends(auth)])
    def pending_gate(session_id: str):
        engine = svc.engine(session_id)
        return {
            "state": engine.state.state,
            "pending_gate": engine.state.pending_gate,
            "flags": engine.state.flags,
        }

    @app.post("/sessions/{session_id}/gate/{gate_id}/edits", dependencies=[Depends(auth)])
    def submit_gate_edits(session_id: str, gate_id: str, body: GateEditsBody):
        engine = svc.engine(session_id)
        lock = svc.jobs.session_lock(session_id)
        if lock.locked():
            raise HTTPException(status_code=409, detail="an agent step is in flight")
        envelope = engine.state.pending_gate
        if envelope is None or envelope.get("gate_id") != gate_id:
            raise HTTPException(
                status_code=409,
                detail=f"stale gate id {gate_id!r}; pending is "
                f"{envelope.get('gate_id') if envelope else None!r}",
            )
        job = svc.jobs.submit(
            session_id,
            lambda: engine.apply_gate_edits(
                gate_id,
                edits=body.edits,
                decision=body.decision,
                edited_title=body.edited_title,
                edited_abstract=body.edited_abstract,
            ),
        )
        return {"job_id": job.job_id, "session_id": session_id}

    @app.post("/sessions/{session_id}/method-synthesis", dependencies=[Depends(auth)])
    def start_method_synthesis(session_id: str):
        engine = svc.engine(session_id)
        if engine.state.state != m.MV_VALIDATED:
            raise HTTPException(
                status_code=409,
                detail=f"method synthesis starts from {m.MV_VALIDATED}, not {engine.state.state}",
            )
        job = svc.jobs.submit(session_id, engine.start_method_synthesis)
        return {"job_id": job.job_id, "session_id": session_id}

    @app.get("/jobs/{job_id}", dependencies=[Depends(auth)])
    def job_status(job_id: str):
        job = svc.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"no job {job_id!r}")
        payload = job.to_dict()
        engine = svc.engines.get(job.session_id)
        if engine is not None:
            payload["state"] = engine.state.state
            gate = engine.state.pending_gate
            payload["pending_gate_id"] = gate.get("gate_id") if gate else None
        return payload

    @app.get("/sessions/{session_id}/state", dependencies=[Depends(auth)])
    def session_state(session_id: str):
        return svc.engine(session_id).state.to_dict()

    @app.get("/sessions/{session_id}/artifacts", dependencies=[Depends(auth)])
    def artifacts(session_id: str):
        state = svc.engine(session_id).state
        return {
            "proposals": state.proposals,
            "candidate": state.candidate,
            "motivation": state.motivation,
            "questions": state.questions,
            "verdicts": state.verdicts,
            "gaps": state.gaps,
            "problem_statement": state.problem_statement,
            "problems": state.problems,
            "evidence": state.evidence,
            "methods": state.methods,
            "flags": state.flags,
            "loop_count": state.loop_count,
            "state": state.state,
        }

    @app.get("/sessions/{session_id}/events", dependencies=[Depends(auth)])
    def events(session_id: str):
        try:
            return [e.to_dict() for e in svc.store.read_events(session_id)]
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/sessions/{session_id}/export", dependencies=[Depends(auth)])
    def export(session_id: str, task: str):
        if task not in EXPORT_TASKS:
            raise HTTPException(status_code=422, detail=f"task must be one of {EXPORT_TASKS}")
        try:
            event_list = list(svc.store.read_events(session_id))
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        records, notice = export_dataset(session_id, event_list, task)
        lines = [canonical_json(r) for r in records]
        headers = {"x-export-notice": notice} if notice else {}
        return PlainTextResponse("\n".join(lines) + ("\n" if lines else ""), headers=headers)

    @app.post("/admin/ingest", dependencies=[Depends(auth)])
    def ingest(body: IngestBody):
        if body.corpus_path:
            read = read_corpus_file(body.corpus_path)
            records = read.records
            problems = read.problems
        elif body.records is not None:
            records = [PaperRecord.from_dict(r) for r in body.records]
            problems = []
        else:
            raise HTTPException(status_code=422, detail="corpus_path or records required")
        report = svc.corpus.ingest_corpus(records, svc.embedder)
        return {
            "count": report.count,
            "skipped": report.skipped + len(problems),
            "reasons": problems + report.reasons,
            "corpus_size": len(svc.corpus),
        }

    @app.exception_handler(GateRejected)
    def gate_rejected_handler(request, exc: GateRejected):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=409, content={"detail": str(exc)})

    if config.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def check_port_free(host: str, port: int) -> None:
    import socket

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise ConfigError([f"port {port} on {host} is unavailable: {exc}"]) from exc
    finally:
        probe.close()


def serve(config: ServiceConfig) -> None:
    """Run the service; port conflicts get their own error, distinct from
    config-field problems."""
    import errno

    import uvicorn

    check_port_free(config.host, config.port)
    app = create_app(config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    except OSError as exc:
        if exc.errno in (errno.EADDRINUSE, errno.EACCES):
            raise ConfigError([f"port {config.port} on {config.host} is unavailable: {exc}"]) from exc
        raise
