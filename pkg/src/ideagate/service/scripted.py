"""Scripted chat provider: the test double for real LLM providers.

Fixtures are matched in order against (template_id, transcript pattern); the
first live match wins. A call that matches nothing raises FixtureMiss with
the missing key, never a silent fallback. Fixtures can also inject failures
(timeouts, hard errors) to exercise retry and fail-soft paths.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from ideagate.agents.providers import CompletionRequest
from ideagate.agents.templates import transcript
from ideagate.errors import FixtureMiss, ProviderError, ProviderTimeout


@dataclass
class Fixture:
    template: str
    response: str = ""
    match: str | None = None          # regex searched in the transcript
    match_all: tuple[str, ...] = ()   # every substring must appear
    error: str | None = None          # "timeout" | "error"
    once: bool = False
    consumed: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "Fixture":
        return cls(
            template=d["template"],
            response=d.get("response", ""),
            match=d.get("match"),
            match_all=tuple(d.get("match_all", ())),
            error=d.get("error"),
            once=bool(d.get("once", False)),
        )

    def matches(self, template_id: str, text: str) -> bool:
        if self.consumed or self.template != template_id:
            return False
        if self.match is not None and re.search(self.match, text, re.DOTALL) is None:
            return False
        return all(needle in text for needle in self.match_all)


class ScriptedChatProvider:
    provider_id = "scripted"
    max_concurrency = 1

    def __init__(self, fixtures: list[Fixture] | None = None):
        self.fixtures = list(fixtures or [])
        self._lock = threading.Lock()
        self.calls: list[str] = []

    @classmethod
    def from_dicts(cls, dicts: list[dict]) -> "ScriptedChatProvider":
        return cls([Fixture.from_dict(d) for d in dicts])

    def add(self, **kwargs) -> None:
        self.fixtures.append(Fixture(**kwargs))

    def complete(self, request: CompletionRequest) -> str:
        text = transcript(list(request.messages))
        with self._lock:
            self.calls.append(request.template_id)
            for fixture in self.fixtures:
                if not fixture.matches(request.template_id, text):
                    continue
                if fixture.once:
                    fixture.consumed = True
                if fixture.error == "timeout":
                    raise ProviderTimeout(f"scripted timeout for {request.template_id}")
                if fixture.error:
                    raise ProviderError(f"scripted error for {request.template_id}: {fixture.error}")
                return fixture.response
        excerpt = text[:120].replace("\n", " ")
        raise FixtureMiss(request.template_id, excerpt)

    def reachable(self) -> bool:
        return True


@dataclass
class GateDecision:
    gate: str
    edits: list[dict]
    decision: str | None = None
    edited_title: str | None = None
    edited_abstract: str | None = None
    consumed: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "GateDecision":
        return cls(
            gate=d["gate"],
            edits=list(d.get("edits", [])),
            decision=d.get("decision"),
            edited_title=d.get("edited_title"),
            edited_abstract=d.get("edited_abstract"),
        )


@dataclass
class RunScript:
    """Everything a headless run needs: provider fixtures plus the
    researcher's gate decisions, in order."""

    fixtures: list[Fixture]
    gates: list[GateDecision]
    gate_defaults: dict[str, GateDecision]
    method_synthesis: bool = False

    @classmethod
    def load(cls, path: str | Path) -> "RunScript":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "RunScript":
        defaults = {
            kind: GateDecision.from_dict({"gate": kind, **d})
            for kind, d in (data.get("gate_defaults") or {}).items()
        }
        return cls(
            fixtures=[Fixture.from_dict(d) for d in data.get("fixtures", [])],
            gates=[GateDecision.from_dict(d) for d in data.get("gates", [])],
            gate_defaults=defaults,
            method_synthesis=bool(data.get("method_synthesis", False)),
        )

    def next_decision(self, kind: str) -> GateDecision | None:
        for entry in self.gates:
            if not entry.consumed and entry.gate == kind:
                entry.consumed = True
                return entry
        return self.gate_defaults.get(kind)
