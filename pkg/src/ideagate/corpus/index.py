"""Global corpus store with stage-1 top-K retrieval.

Document-level embeddings over title+abstract, cosine similarity, exact scan.
The scan IS the reference implementation: small-corpus oracle equivalence is
a hard contract, so no approximate structure hides behind it. Ties break by
ascending paper_id for reproducibility.

Reads are concurrent; ingestion takes the writer lock and swaps an immutable
snapshot, so a session never observes a half-built index.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ideagate.agents.providers import EmbeddingProvider
from ideagate.corpus.records import PaperRecord
from ideagate.errors import NotFound, PreconditionError


@dataclass(frozen=True)
class RetrievalHit:
    paper_id: str
    score: float
    rank: int

    def to_dict(self) -> dict:
        return {"paper_id": self.paper_id, "score": self.score, "rank": self.rank}


@dataclass
class IngestReport:
    count: int = 0
    skipped: int = 0
    reasons: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class _Snapshot:
    """Immutable retrieval view: ids sorted ascending, rows unit-normalized."""

    ids: tuple[str, ...]
    matrix: np.ndarray  # (n, d), zero rows kept zero

    @property
    def size(self) -> int:
        return len(self.ids)


def embed_document(title: str, abstract: str, provider: EmbeddingProvider) -> np.ndarray:
    """Embed one title+abstract document. Deterministic per provider."""
    if not title or not title.strip():
        raise PreconditionError("title must be non-empty")
    vec = np.asarray(provider.embed_pairs([(title, abstract)])[0], dtype=np.float64)
    if vec.shape != (provider.dimension,):
        raise PreconditionError(
            f"provider returned dimension {vec.shape}, expected ({provider.dimension},)"
        )
    if not np.all(np.isfinite(vec)):
        raise PreconditionError("provider returned non-finite components")
    return vec


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return matrix / norms


class CorpusIndex:
    """In-memory corpus of PaperRecords with per-model document embeddings."""

    def __init__(self):
        self._records: dict[str, PaperRecord] = {}
        self._vectors: dict[str, dict[str, np.ndarray]] = {}  # model_id -> paper_id -> vec
        self._snapshots: dict[str, _Snapshot] = {}
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    def ingest_corpus(
        self, records: Iterable[PaperRecord], provider: EmbeddingProvider
    ) -> IngestReport:
        """Embed and index every sound, non-duplicate record.

        Duplicate paper_ids (including duplicates within the batch) and
        malformed records are skipped with a reason; the batch never aborts
        on them. A provider failure aborts with nothing committed.
        """
        report = IngestReport()
        with self._write_lock:
            fresh: list[PaperRecord] = []
            seen_in_batch: set[str] = set()
            for rec in records:
                problem = rec.validate()
                if problem is not None:
                    report.skipped += 1
                    report.reasons.append(f"{rec.paper_id or '<no id>'}: {problem}")
                    continue
                if rec.paper_id in self._records or rec.paper_id in seen_in_batch:
                    report.skipped += 1
                    report.reasons.append(f"{rec.paper_id}: duplicate paper_id")
                    continue
                seen_in_batch.add(rec.paper_id)
                fresh.append(rec)

            if fresh:
                vectors = np.asarray(
                    provider.embed_pairs([(r.title, r.abstract) for r in fresh]),
                    dtype=np.float64,
                )
                if vectors.shape != (len(fresh), provider.dimension):
                    raise PreconditionError(
                        f"provider returned shape {vectors.shape}, expected "
                        f"{(len(fresh), provider.dimension)}"
                    )
                if not np.all(np.isfinite(vectors)):
                    raise PreconditionError("provider returned non-finite components")
                by_model = self._vectors.setdefault(provider.model_id, {})
                for rec, vec in zip(fresh, vectors):
                    self._records[rec.paper_id] = rec
                    by_model[rec.paper_id] = vec
                report.count = len(fresh)
                self._rebuild_snapshot(provider.model_id)
        return report

    def _rebuild_snapshot(self, model_id: str) -> None:
        by_model = self._vectors.get(model_id, {})
        ids = tuple(sorted(by_model))
        if ids:
            matrix = _normalize_rows(np.stack([by_model[i] for i in ids]))
        else:
            matrix = np.zeros((0, 0))
        self._snapshots[model_id] = _Snapshot(ids=ids, matrix=matrix)

    def retrieve_topk(
        self, query_text: str, k: int, provider: EmbeddingProvider
    ) -> list[RetrievalHit]:
        """Top-k by cosine over the provider's embeddings; exact scan."""
        if k < 1:
            raise PreconditionError("k must be >= 1")
        snap = self._snapshots.get(provider.model_id)
        if snap is None or snap.size == 0:
            return []
        qv = np.asarray(provider.embed_texts([query_text])[0], dtype=np.float64)
        qnorm = np.linalg.norm(qv)
        if qnorm > 0:
            qv = qv / qnorm
        scores = snap.matrix @ qv
        np.clip(scores, -1.0, 1.0, out=scores)
        order = sorted(range(snap.size), key=lambda i: (-scores[i], snap.ids[i]))
        return [
            RetrievalHit(paper_id=snap.ids[i], score=float(scores[i]), rank=rank)
            for rank, i in enumerate(order[: min(k, snap.size)], start=1)
        ]

    def lookup_paper(self, paper_id: str) -> PaperRecord:
        if not self._records:
            raise NotFound("corpus is empty")
        try:
            return self._records[paper_id]
        except KeyError:
            raise NotFound(f"paper {paper_id!r} not in corpus") from None

    def has_paper(self, paper_id: str) -> bool:
        return paper_id in self._records

    def paper_ids(self) -> tuple[str, ...]:
        return tuple(self._records)
