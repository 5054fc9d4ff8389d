"""Exception hierarchy shared across the package.

Provider errors split into retryable (timeouts, transient transport) and
non-retryable (rejected input, auth) classes; the agent runtime retries only
the former. Everything else is a plain contract violation surfaced to the
caller.
"""

from __future__ import annotations


class IdeagateError(Exception):
    """Base class for all package errors."""


class ConfigError(IdeagateError):
    """Invalid service configuration. Carries field-level diagnostics."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration: " + "; ".join(self.problems))


class ProviderError(IdeagateError):
    """Non-retryable provider failure (bad input, auth, 4xx)."""


class ProviderTimeout(ProviderError):
    """Retryable provider failure (timeout or transient transport error)."""


class ProviderRejectedInput(ProviderError):
    """Provider rejected the input; surfaces the offending input."""

    def __init__(self, message: str, offending_input: str = ""):
        self.offending_input = offending_input
        super().__init__(message)


class BudgetExhausted(IdeagateError):
    """Retry budget used up without a successful provider response."""


class FixtureMiss(IdeagateError):
    """Scripted provider had no fixture for a call. Never a silent fallback."""

    def __init__(self, template_id: str, excerpt: str):
        self.template_id = template_id
        self.excerpt = excerpt
        super().__init__(f"no fixture for template {template_id!r} (call excerpt: {excerpt!r})")


class NotFound(IdeagateError):
    """Lookup of a known-id item failed. Distinct from an empty store."""


class UnknownTemplate(IdeagateError):
    """No prompt template registered under the requested id."""


class UnboundSlot(IdeagateError):
    """Prompt rendering attempted with a placeholder left unbound."""

    def __init__(self, template_id: str, slot: str):
        self.template_id = template_id
        self.slot = slot
        super().__init__(f"template {template_id!r}: slot {slot!r} is unbound")


class PreconditionError(IdeagateError):
    """Operation invoked outside its contract (wrong state, missing input)."""


class ParseError(IdeagateError):
    """Source document could not be decoded into text."""

    def __init__(self, paper_id: str, reason: str):
        self.paper_id = paper_id
        super().__init__(f"cannot parse document for paper {paper_id!r}: {reason}")


class GateRejected(IdeagateError):
    """Gate submission refused: stale gate id, unknown item, or invalid edit.

    State is guaranteed unchanged when this is raised.
    """


class TransitionError(IdeagateError):
    """Event sequence violates the workflow transition relation."""


class SessionClosed(IdeagateError):
    """Append attempted on a closed session log."""


class ReplayCorruption(IdeagateError):
    """Replay halted on an undecodable log entry (strict mode only)."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        super().__init__(f"corrupt log entry at line {line_no}: {reason}")
