"""Persona-tiered execution of prompt templates against chat providers.

The runtime owns retry policy (timeouts retried with exponential backoff up
to a call budget), per-provider concurrency limits, and the call metadata the
session log records. It knows nothing about workflow state.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from ideagate.agents.providers import ChatProvider, CompletionRequest
from ideagate.agents.templates import Message, get_template
from ideagate.errors import BudgetExhausted, PreconditionError, ProviderError, ProviderTimeout

PERSONAS = ("colleague", "mentor")


@dataclass(frozen=True)
class PersonaConfig:
    persona: str
    provider_id: str
    model_name: str
    temperature: float = 0.0
    max_output_tokens: int = 1024

    def __post_init__(self):
        if self.persona not in PERSONAS:
            raise ValueError(f"unknown persona {self.persona!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    persona: str
    template_id: str
    latency_s: float
    attempts: int


class AgentRuntime:
    """Routes template calls to the right persona's provider with retries."""

    def __init__(
        self,
        providers: dict[str, ChatProvider],
        personas: dict[str, PersonaConfig],
        call_budget: int = 3,
        backoff_base_s: float = 0.05,
        sleep=time.sleep,
    ):
        missing = [p for p in PERSONAS if p not in personas]
        if missing:
            raise PreconditionError(f"personas not configured: {', '.join(missing)}")
        for cfg in personas.values():
            if cfg.provider_id not in providers:
                raise PreconditionError(
                    f"persona {cfg.persona!r} references unknown provider {cfg.provider_id!r}"
                )
        self.providers = providers
        self.personas = personas
        self.call_budget = call_budget
        self.backoff_base_s = backoff_base_s
        self._sleep = sleep
        self._limits = {
            pid: threading.Semaphore(max(1, getattr(p, "max_concurrency", 1)))
            for pid, p in providers.items()
        }

    def complete(
        self,
        persona: str,
        template_id: str,
        messages: list[Message],
        call_budget: int | None = None,
    ) -> CompletionResult:
        """Execute one rendered prompt; timeouts retried up to the budget."""
        if persona not in self.personas:
            raise PreconditionError(f"persona {persona!r} not configured")
        cfg = self.personas[persona]
        provider = self.providers[cfg.provider_id]
        budget = self.call_budget if call_budget is None else call_budget
        if budget < 1:
            raise PreconditionError("call budget must be >= 1")
        request = CompletionRequest(
            template_id=template_id,
            messages=tuple(messages),
            model_name=cfg.model_name,
            temperature=cfg.temperature,
            max_output_tokens=cfg.max_output_tokens,
        )
        start = time.monotonic()
        last: ProviderTimeout | None = None
        for attempt in range(1, budget + 1):
            try:
                with self._limits[cfg.provider_id]:
                    text = provider.complete(request)
                return CompletionResult(
                    text=text,
                    persona=persona,
                    template_id=template_id,
                    latency_s=time.monotonic() - start,
                    attempts=attempt,
                )
            except ProviderTimeout as exc:
                last = exc
                if attempt < budget:
                    self._sleep(self.backoff_base_s * (2 ** (attempt - 1)))
            except ProviderError:
                raise
        raise BudgetExhausted(
            f"{template_id} on {persona} failed after {budget} attempt(s): {last}"
        )

    def run(self, template_id: str, bindings: dict[str, str], call_budget: int | None = None):
        """Render a template and execute it on its assigned persona.

        Returns (messages, result) so callers can log the exact input.
        """
        template = get_template(template_id)
        messages = template.render(bindings)
        result = self.complete(template.persona, template_id, messages, call_budget)
        return messages, result

    def reachability(self) -> dict[str, bool]:
        return {pid: bool(p.reachable()) for pid, p in self.providers.items()}
