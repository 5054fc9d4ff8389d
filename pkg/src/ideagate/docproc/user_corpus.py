"""Per-session chunk index: the agents' shared memory.

Stage-2 retrieval happens here: low-k, per-paper, cosine-ranked chunk lookup
for a specific question. Indexing is all-or-nothing per paper and idempotent
per (session, paper); only papers the session has admitted (Gate A for
validation, the evidence step for method synthesis) may be indexed.
"""

from __future__ import annotations

import json
import threading
from typing import IO, Iterable

import numpy as np

from ideagate.agents.providers import EmbeddingProvider
from ideagate.docproc.chunking import WHITESPACE, Chunk, Tokenizer, chunk_document
from ideagate.docproc.segment import DocumentText
from ideagate.errors import NotFound, PreconditionError


class UserCorpus:
    def __init__(
        self,
        session_id: str,
        provider: EmbeddingProvider,
        max_tokens: int = 512,
        tokenizer: Tokenizer = WHITESPACE,
    ):
        self.session_id = session_id
        self.provider = provider
        self.max_tokens = max_tokens
        self.tokenizer = tokenizer
        self._allowed: set[str] = set()
        self._chunks: dict[str, list[Chunk]] = {}
        self._matrices: dict[str, np.ndarray] = {}
        self._write_lock = threading.Lock()

    def allow_papers(self, paper_ids: Iterable[str]) -> None:
        """Admit papers for indexing (researcher-approved or evidence-retrieved)."""
        self._allowed.update(paper_ids)

    def is_indexed(self, paper_id: str) -> bool:
        return paper_id in self._chunks

    def paper_ids(self) -> tuple[str, ...]:
        return tuple(self._chunks)

    def chunk_count(self, paper_id: str) -> int:
        return len(self._chunks.get(paper_id, ()))

    def get_chunks(self, paper_id: str) -> list[Chunk]:
        if paper_id not in self._chunks:
            raise NotFound(f"paper {paper_id!r} not indexed in session {self.session_id!r}")
        return list(self._chunks[paper_id])

    def index_chunks(self, doc: DocumentText) -> int:
        """Chunk, embed, and index one paper. All-or-nothing; idempotent."""
        with self._write_lock:
            if doc.paper_id in self._chunks:
                return len(self._chunks[doc.paper_id])
            if doc.paper_id not in self._allowed:
                raise PreconditionError(
                    f"paper {doc.paper_id!r} was not admitted to session {self.session_id!r}"
                )
            chunks = chunk_document(doc.paper_id, doc.paragraphs, self.max_tokens, self.tokenizer)
            if chunks:
                matrix = np.asarray(
                    self.provider.embed_texts([c.text for c in chunks]), dtype=np.float64
                )
                norms = np.linalg.norm(matrix, axis=1, keepdims=True)
                norms[norms == 0] = 1.0
                matrix = matrix / norms
            else:
                matrix = np.zeros((0, self.provider.dimension))
            self._chunks[doc.paper_id] = chunks
            self._matrices[doc.paper_id] = matrix
            return len(chunks)

    def retrieve_chunks(
        self, paper_id: str, query: str, k_small: int
    ) -> list[tuple[Chunk, float]]:
        """Top-k_small chunks of one paper only, cosine-ranked, ties by chunk_id."""
        if k_small < 1:
            raise PreconditionError("k_small must be >= 1")
        if paper_id not in self._chunks:
            raise NotFound(f"paper {paper_id!r} not indexed in session {self.session_id!r}")
        chunks = self._chunks[paper_id]
        if not chunks:
            return []
        qv = np.asarray(self.provider.embed_texts([query])[0], dtype=np.float64)
        qnorm = np.linalg.norm(qv)
        if qnorm > 0:
            qv = qv / qnorm
        scores = self._matrices[paper_id] @ qv
        np.clip(scores, -1.0, 1.0, out=scores)
        order = sorted(range(len(chunks)), key=lambda i: (-scores[i], chunks[i].chunk_id))
        return [(chunks[i], float(scores[i])) for i in order[: min(k_small, len(chunks))]]

    def dump_chunks(self, fh: IO[str]) -> int:
        """Write all indexed chunks as JSON-lines for inspection/replay fixtures."""
        n = 0
        for paper_id in self._chunks:
            for chunk in self._chunks[paper_id]:
                fh.write(json.dumps(chunk.to_dict(), ensure_ascii=False) + "\n")
                n += 1
        return n

    def clone_into(self, session_id: str) -> "UserCorpus":
        """Explicit copy for a new session; shares nothing mutable."""
        clone = UserCorpus(session_id, self.provider, self.max_tokens, self.tokenizer)
        clone._allowed = set(self._allowed)
        clone._chunks = {pid: list(chs) for pid, chs in self._chunks.items()}
        clone._matrices = {pid: m.copy() for pid, m in self._matrices.items()}
        return clone
