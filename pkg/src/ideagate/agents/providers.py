"""Provider adapters: embeddings and chat completions.

Two embedding providers ship here: a deterministic hash-based one (no network,
used by tests, fixtures, and headless runs) and an HTTP adapter speaking the
documented transport contract (request = list of (title, abstract) documents,
response = list of equal-length vectors). Chat providers follow the same
split; the scripted chat provider lives in ideagate.service.scripted next to
the harness that feeds it.
"""

from __future__ import annotations

import hashlib
import os
import threading
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from ideagate.agents.templates import Message
from ideagate.errors import ProviderError, ProviderRejectedInput, ProviderTimeout


def compose_document_text(title: str, abstract: str) -> str:
    """Canonical single-text form of a (title, abstract) document."""
    return f"{title}\n{abstract}" if abstract else title


@runtime_checkable
class EmbeddingProvider(Protocol):
    model_id: str
    dimension: int

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        """Return an (n, dimension) float array, one row per input text."""
        ...

    def embed_pairs(self, pairs: Sequence[tuple[str, str]]) -> np.ndarray:
        ...


class HashEmbeddingProvider:
    """Deterministic bag-of-tokens embedding.

    Each whitespace token maps to a fixed pseudo-random unit direction seeded
    from its SHA-256; a text embeds to the normalized sum of its token
    vectors. Identical texts embed identically; texts sharing tokens land
    close; disjoint vocabularies are near-orthogonal. Good enough to give
    retrieval tests real structure without a model.
    """

    def __init__(self, dimension: int = 64, model_id: str | None = None):
        if dimension < 2:
            raise ValueError("dimension must be >= 2")
        self.dimension = dimension
        self.model_id = model_id or f"hash-{dimension}"
        self._token_cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def _token_vector(self, token: str) -> np.ndarray:
        vec = self._token_cache.get(token)
        if vec is None:
            seed = int.from_bytes(hashlib.sha256(token.encode("utf-8")).digest()[:8], "big")
            vec = np.random.default_rng(seed).standard_normal(self.dimension)
            vec /= np.linalg.norm(vec)
            with self._lock:
                self._token_cache[token] = vec
        return vec

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dimension), dtype=np.float64)
        for i, text in enumerate(texts):
            tokens = text.split()
            if not tokens:
                continue
            acc = np.zeros(self.dimension, dtype=np.float64)
            for tok in tokens:
                acc += self._token_vector(tok)
            norm = np.linalg.norm(acc)
            if norm > 0:
                acc /= norm
            out[i] = acc
        return out

    def embed_pairs(self, pairs: Sequence[tuple[str, str]]) -> np.ndarray:
        return self.embed_texts([compose_document_text(t, a) for t, a in pairs])


class HttpEmbeddingProvider:
    """Adapter for a remote embedding endpoint.

    POSTs ``{"model": ..., "documents": [{"title": ..., "abstract": ...}]}``
    and expects ``{"vectors": [[...], ...]}`` with one equal-length vector per
    document. Auth token comes from the configured environment variable.
    """

    def __init__(
        self,
        endpoint: str,
        model_id: str,
        dimension: int,
        api_key_env: str | None = None,
        timeout_s: float = 30.0,
    ):
        self.endpoint = endpoint
        self.model_id = model_id
        self.dimension = dimension
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s

    def _headers(self) -> dict[str, str]:
        headers = {"content-type": "application/json"}
        if self.api_key_env:
            token = os.environ.get(self.api_key_env, "")
            headers["authorization"] = f"Bearer {token}"
        return headers

    def embed_pairs(self, pairs: Sequence[tuple[str, str]]) -> np.ndarray:
        import httpx

        body = {
            "model": self.model_id,
            "documents": [{"title": t, "abstract": a} for t, a in pairs],
        }
        try:
            resp = httpx.post(self.endpoint, json=body, headers=self._headers(), timeout=self.timeout_s)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"embedding endpoint timed out: {exc}") from exc
        except httpx.TransportError as exc:
            raise ProviderTimeout(f"embedding endpoint unreachable: {exc}") from exc
        if resp.status_code == 400:
            raise ProviderRejectedInput(
                f"embedding endpoint rejected input: {resp.text}",
                offending_input=repr(pairs[:1]),
            )
        if resp.status_code >= 500:
            raise ProviderTimeout(f"embedding endpoint error {resp.status_code}")
        if resp.status_code >= 400:
            raise ProviderError(f"embedding endpoint error {resp.status_code}: {resp.text}")
        vectors = resp.json()["vectors"]
        arr = np.asarray(vectors, dtype=np.float64)
        if arr.ndim != 2 or arr.shape != (len(pairs), self.dimension):
            raise ProviderError(
                f"embedding endpoint returned shape {arr.shape}, expected {(len(pairs), self.dimension)}"
            )
        return arr

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        return self.embed_pairs([(t, "") for t in texts])


@dataclass(frozen=True)
class CompletionRequest:
    """One chat call: the rendered messages plus routing metadata."""

    template_id: str
    messages: tuple[Message, ...]
    model_name: str = ""
    temperature: float = 0.0
    max_output_tokens: int = 1024


@runtime_checkable
class ChatProvider(Protocol):
    provider_id: str
    max_concurrency: int

    def complete(self, request: CompletionRequest) -> str:
        ...

    def reachable(self) -> bool:
        ...


class HttpChatProvider:
    """Adapter for a remote chat endpoint.

    POSTs role-tagged messages, expects ``{"text": ...}``. Timeouts and 5xx
    raise the retryable class; 4xx surfaces immediately.
    """

    def __init__(
        self,
        provider_id: str,
        endpoint: str,
        api_key_env: str | None = None,
        timeout_s: float = 60.0,
        max_concurrency: int = 4,
    ):
        self.provider_id = provider_id
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s
        self.max_concurrency = max_concurrency

    def _headers(self) -> dict[str, str]:
        headers = {"content-type": "application/json"}
        if self.api_key_env:
            token = os.environ.get(self.api_key_env, "")
            headers["authorization"] = f"Bearer {token}"
        return headers

    def complete(self, request: CompletionRequest) -> str:
        import httpx

        body = {
            "model": request.model_name,
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
            "messages": [m.to_dict() for m in request.messages],
        }
        try:
            resp = httpx.post(self.endpoint, json=body, headers=self._headers(), timeout=self.timeout_s)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"chat endpoint timed out: {exc}") from exc
        except httpx.TransportError as exc:
            raise ProviderTimeout(f"chat endpoint unreachable: {exc}") from exc
        if resp.status_code >= 500:
            raise ProviderTimeout(f"chat endpoint error {resp.status_code}")
        if resp.status_code >= 400:
            raise ProviderError(f"chat endpoint error {resp.status_code}: {resp.text}")
        return resp.json()["text"]

    def reachable(self) -> bool:
        import httpx

        try:
            httpx.head(self.endpoint, timeout=min(self.timeout_s, 5.0))
            return True
        except httpx.HTTPError:
            return False


@dataclass
class StaticChatProvider:
    """Returns a fixed response to every call. Handy in unit tests."""

    response: str = "No"
    provider_id: str = "static"
    max_concurrency: int = 1
    calls: list[CompletionRequest] = field(default_factory=list)

    def complete(self, request: CompletionRequest) -> str:
        self.calls.append(request)
        return self.response

    def reachable(self) -> bool:
        return True
