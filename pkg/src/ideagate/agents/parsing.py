"""Parsers for structured agent output: binary verdicts and bullet lists.

Both parsers are total: any input yields a result, never an exception. The
caller logs every raw response verbatim, so nothing is lost when a response
falls through to the conservative fallback.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

VERDICT_YES = "Yes"
VERDICT_NO = "No"
VERDICT_UNANSWERABLE = "Unanswerable"

# Longest alternative first so "Unanswerable" is never read as a bare "No".
_VERDICT_HEAD = re.compile(
    r"^[\s\"'“”‘’*_#>`-]*(unanswerable|yes|no)\b[\"'“”‘’*_`]*", re.IGNORECASE
)
_JUSTIFICATION_SEP = re.compile(r"^[\s.:,;!?–—-]+")

_BULLET = re.compile(r"^\s*(?:[-*•]|\d+\.)\s*(.*)$")


@dataclass(frozen=True)
class BinaryAnswer:
    """Verdict plus justification; justification present iff verdict is Yes."""

    verdict: str
    justification: str | None = None

    @property
    def is_yes(self) -> bool:
        return self.verdict == VERDICT_YES


@dataclass(frozen=True)
class BulletList:
    items: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.items)

    @property
    def empty(self) -> bool:
        return not self.items


def parse_binary_answer(raw: str) -> BinaryAnswer:
    """Map raw agent text onto {Yes, No, Unanswerable}.

    The leading token decides the verdict; for Yes the remainder (past any
    separator punctuation) is the justification. A Yes without justification
    downgrades to Unanswerable: an explanation the researcher cannot vet is
    worth nothing, and treating it as a grounded Yes would defeat the gate.
    Unrecognized text maps to Unanswerable.
    """
    m = _VERDICT_HEAD.match(raw or "")
    if m is None:
        return BinaryAnswer(VERDICT_UNANSWERABLE)
    head = m.group(1).lower()
    if head == "no":
        return BinaryAnswer(VERDICT_NO)
    if head == "unanswerable":
        return BinaryAnswer(VERDICT_UNANSWERABLE)
    remainder = _JUSTIFICATION_SEP.sub("", raw[m.end():]).strip()
    if not remainder:
        return BinaryAnswer(VERDICT_UNANSWERABLE)
    return BinaryAnswer(VERDICT_YES, justification=remainder)


def parse_bullets(raw: str) -> BulletList:
    """Extract bullet items from raw agent text.

    Lines starting with -, *, •, or "N." become items with the marker
    stripped; anything else (headings, prose) is dropped. No markers at all
    yields an empty list, which callers flag for researcher authoring.
    """
    items: list[str] = []
    for line in (raw or "").splitlines():
        m = _BULLET.match(line)
        if m is None:
            continue
        text = m.group(1).strip()
        if text:
            items.append(text)
    return BulletList(tuple(items))
