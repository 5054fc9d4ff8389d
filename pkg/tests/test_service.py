"""HTTP service: endpoints, async jobs, gate staleness, config validation."""

from __future__ import annotations

import json
import socket
import time

import pytest
from fastapi.testclient import TestClient

from ideagate.corpus.records import write_corpus_file
from ideagate.errors import ConfigError
from ideagate.service.app import check_port_free, create_app
from ideagate.service.config import ServiceConfig
from ideagate.service.scripted import Fixture

from conftest import synthetic_records
from test_workflow import QUESTION, mv_fixtures


def service_config(tmp_path, corpus_records=20) -> ServiceConfig:
    corpus_path = tmp_path / "corpus.jsonl"
    write_corpus_file(corpus_path, synthetic_records(corpus_records))
    cfg = ServiceConfig.default()
    cfg.corpus_path = str(corpus_path)
    cfg.store_dir = str(tmp_path / "sessions")
    data = json.loads(json.dumps({
        "engine": {"k_papers": 10, "k_small": 3, "k_per_problem": 5},
    }))
    from ideagate.workflow.engine import EngineConfig

    cfg.engine = EngineConfig(k_papers=10, k_small=3, k_per_problem=5)
    return cfg


def wait_job(client: TestClient, job_id: str, timeout_s: float = 10.0) -> dict:
    deadline = time.monotonic() + timeout_s
    while time.monotonic() < deadline:
        body = client.get(f"/jobs/{job_id}").json()
        if body["status"] in ("succeeded", "failed"):
            return body
        time.sleep(0.01)
    raise AssertionError("job never finished")


@pytest.fixture
def client(tmp_path):
    cfg = service_config(tmp_path)
    app = create_app(cfg)
    client = TestClient(app)
    # arm the scripted provider all sessions share
    provider = app.state.svc.providers["scripted"]
    provider.fixtures.extend(mv_fixtures(yes_markers=()))
    provider.fixtures[3] = Fixture(template="P3", response="No")
    return client


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["corpus_size"] == 20
    assert body["providers"] == {"scripted": True}


def test_full_session_over_http(client):
    created = client.post("/sessions", json={"session_id": "web1"}).json()
    assert created == {"session_id": "web1", "state": "MV-Start"}

    job = client.post("/sessions/web1/proposal", json={
        "title": "Peer review corpus study",
        "abstract": "an ethically sourced corpus of papers and review reports",
    }).json()
    done = wait_job(client, job["job_id"])
    assert done["status"] == "succeeded"
    assert done["state"] == "GateA-Papers"

    gate = client.get("/sessions/web1/gate").json()
    envelope = gate["pending_gate"]
    assert envelope["kind"] == "A"
    assert len(envelope["items"]) == 10

    job = client.post(f"/sessions/web1/gate/{envelope['gate_id']}/edits", json={}).json()
    assert wait_job(client, job["job_id"])["state"] == "GateB-Questions"

    envelope = client.get("/sessions/web1/gate").json()["pending_gate"]
    job = client.post(f"/sessions/web1/gate/{envelope['gate_id']}/edits", json={}).json()
    final = wait_job(client, job["job_id"])
    assert final["status"] == "succeeded"
    assert final["state"] == "MV-Validated"

    state = client.get("/sessions/web1/state").json()
    assert state["flags"]["validation_notice"] == "motivation of the proposal is validated"
    artifacts = client.get("/sessions/web1/artifacts").json()
    assert len(artifacts["verdicts"]) == 10
    assert artifacts["questions"][0]["text"].startswith("Is the research paper")

    events = client.get("/sessions/web1/events").json()
    assert events[0]["payload"]["to"] == "MV-Start"

    export = client.get("/sessions/web1/export", params={"task": "motivation-retrieval"})
    lines = [json.loads(l) for l in export.text.splitlines() if l]
    assert len(lines) == 10


def test_stale_gate_rejected_synchronously(client):
    client.post("/sessions", json={"session_id": "web2"})
    job = client.post("/sessions/web2/proposal", json={
        "title": "T", "abstract": "A proposal abstract",
    }).json()
    wait_job(client, job["job_id"])
    resp = client.post("/sessions/web2/gate/web2:g999/edits", json={})
    assert resp.status_code == 409
    assert "stale" in resp.json()["detail"]


def test_resolved_gate_resubmission_rejected(client):
    client.post("/sessions", json={"session_id": "web3"})
    job = client.post("/sessions/web3/proposal", json={
        "title": "T", "abstract": "A proposal abstract",
    }).json()
    wait_job(client, job["job_id"])
    envelope = client.get("/sessions/web3/gate").json()["pending_gate"]
    job = client.post(f"/sessions/web3/gate/{envelope['gate_id']}/edits", json={}).json()
    wait_job(client, job["job_id"])
    again = client.post(f"/sessions/web3/gate/{envelope['gate_id']}/edits", json={})
    assert again.status_code == 409


def test_unknown_session_404(client):
    assert client.get("/sessions/ghost/state").status_code == 404
    assert client.get("/sessions/ghost/gate").status_code == 404


def test_empty_proposal_422(client):
    client.post("/sessions", json={"session_id": "web4"})
    resp = client.post("/sessions/web4/proposal", json={"title": "T", "abstract": "   "})
    assert resp.status_code == 422


def test_admin_ingest(client):
    resp = client.post("/admin/ingest", json={"records": [
        {"paper_id": "new1", "title": "fresh paper", "abstract": "brand new"},
        {"paper_id": "doc0001", "title": "dup", "abstract": "dup"},
    ]}).json()
    assert resp["count"] == 1
    assert resp["skipped"] == 1
    assert resp["corpus_size"] == 21


def test_method_synthesis_requires_validated(client):
    client.post("/sessions", json={"session_id": "web5"})
    resp = client.post("/sessions/web5/method-synthesis")
    assert resp.status_code == 409


def test_export_task_validation(client):
    client.post("/sessions", json={"session_id": "web6"})
    resp = client.get("/sessions/web6/export", params={"task": "bogus"})
    assert resp.status_code == 422


def test_auth_token(tmp_path, monkeypatch):
    monkeypatch.setenv("IG_TOKEN", "sekret")
    cfg = service_config(tmp_path)
    cfg.auth_token_env = "IG_TOKEN"
    client = TestClient(create_app(cfg))
    assert client.post("/sessions", json={}).status_code == 401
    ok = client.post("/sessions", json={}, headers={"authorization": "Bearer sekret"})
    assert ok.status_code == 200
    # health stays open
    assert client.get("/health").status_code == 200


# -- config validation ---------------------------------------------------

def test_missing_credential_names_variable(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "providers": {"llm": {"type": "http", "endpoint": "http://x", "api_key_env": "NO_SUCH_VAR_XYZ"}},
        "personas": {
            "colleague": {"provider_id": "llm", "model_name": "a"},
            "mentor": {"provider_id": "llm", "model_name": "b"},
        },
    }))
    with pytest.raises(ConfigError) as err:
        ServiceConfig.load(cfg_path)
    assert "NO_SUCH_VAR_XYZ" in str(err.value)


def test_field_level_diagnostics(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "engine": {"k_papers": 0, "loop_cap": 0},
        "embedding": {"type": "warp"},
        "personas": {"colleague": {"provider_id": "nope", "model_name": "a"}},
    }))
    with pytest.raises(ConfigError) as err:
        ServiceConfig.load(cfg_path)
    message = str(err.value)
    for needle in ("engine.k_papers", "engine.loop_cap", "embedding.type",
                   "personas.colleague.provider_id", "personas.mentor"):
        assert needle in message


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        ServiceConfig.load(tmp_path / "absent.json")


def test_port_in_use_distinct_error():
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    _, port = blocker.getsockname()
    try:
        with pytest.raises(ConfigError, match="unavailable"):
            check_port_free("127.0.0.1", port)
    finally:
        blocker.close()


def test_default_config_valid():
    ServiceConfig.default().validate()
