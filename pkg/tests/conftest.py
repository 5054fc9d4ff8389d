from __future__ import annotations

import random

import pytest

from ideagate.agents.providers import HashEmbeddingProvider
from ideagate.agents.runtime import AgentRuntime, PersonaConfig
from ideagate.corpus.index import CorpusIndex
from ideagate.corpus.records import PaperRecord
from ideagate.service.scripted import ScriptedChatProvider
from ideagate.session.store import SessionStore
from ideagate.workflow.engine import EngineConfig, WorkflowEngine
from ideagate.workflow.model import Proposal

WORDS = (
    "retrieval corpus review metric graph embedding answer question peer summary "
    "citation neural dataset evaluation annotation tokenizer span benchmark model "
    "latent sparse dense ranking recall precision topic abstract method ablation"
).split()


def synthetic_records(n: int, seed: int = 7) -> list[PaperRecord]:
    rng = random.Random(seed)
    records = []
    for i in range(n):
        title = " ".join(rng.choices(WORDS, k=rng.randint(3, 7)))
        abstract = " ".join(rng.choices(WORDS, k=rng.randint(15, 40)))
        records.append(PaperRecord(paper_id=f"doc{i:04d}", title=title, abstract=abstract))
    return records


@pytest.fixture
def embedder():
    return HashEmbeddingProvider(dimension=32)


@pytest.fixture
def small_corpus(embedder):
    index = CorpusIndex()
    index.ingest_corpus(synthetic_records(20), embedder)
    return index


def make_runtime(provider, call_budget: int = 3) -> AgentRuntime:
    return AgentRuntime(
        {"scripted": provider},
        {
            "colleague": PersonaConfig("colleague", "scripted", "colleague-tier"),
            "mentor": PersonaConfig("mentor", "scripted", "mentor-tier", temperature=0.2),
        },
        call_budget=call_budget,
        backoff_base_s=0.0,
    )


def make_engine(
    tmp_path,
    corpus: CorpusIndex,
    embedder,
    fixtures,
    session_id: str = "t",
    config: EngineConfig | None = None,
    call_budget: int = 3,
):
    provider = ScriptedChatProvider(fixtures)
    runtime = make_runtime(provider, call_budget)
    store = SessionStore(tmp_path / "sessions", durable=False)
    engine = WorkflowEngine(
        session_id=session_id,
        store=store,
        corpus=corpus,
        runtime=runtime,
        embedder=embedder,
        config=config or EngineConfig(k_papers=10, k_small=3, k_per_problem=5),
    )
    return engine, store, provider


def proposal() -> Proposal:
    return Proposal(
        title="Peer review corpus study",
        abstract="we plan an ethically sourced multi domain corpus of papers and review reports",
    )
