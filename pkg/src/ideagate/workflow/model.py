"""Workflow domain model: states, transition relation, artifacts, gates.

Any artifact an agent step consumes must first cross a researcher gate; the
transition relation below encodes exactly the legal paths, and the reducer
rejects anything else. State tags are stable wire strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ideagate.errors import PreconditionError

# Motivation-validation states
MV_START = "MV-Start"
MV_RETRIEVED = "MV-Retrieved"
GATE_A = "GateA-Papers"
MV_CHUNKED = "MV-Chunked"
MV_MOTIVATION = "MV-MotivationExtracted"
GATE_B = "GateB-Questions"
MV_VALIDATED = "MV-Validated"  # terminal for validation; method synthesis may start
GATE_C = "GateC-Verdicts"
MV_GAPS = "MV-GapsExtracted"
GATE_D = "GateD-Gaps"
MV_REWRITTEN = "MV-Rewritten"
GATE_E = "GateE-Proposal"

# Method-synthesis states
MS_PROBLEM = "MS-ProblemExtracted"
MS_RELATED = "MS-RelatedGenerated"
GATE_F = "GateF-Problems"
MS_EVIDENCE = "MS-EvidenceGathered"
GATE_G = "GateG-Evidence"
MS_SYNTH = "MS-Synthesized"
GATE_H = "GateH-Methods"
MS_REWRITTEN = "MS-Rewritten"
GATE_I = "GateI-Final"

DONE = "Done"

ALL_STATES = (
    MV_START, MV_RETRIEVED, GATE_A, MV_CHUNKED, MV_MOTIVATION, GATE_B, MV_VALIDATED,
    GATE_C, MV_GAPS, GATE_D, MV_REWRITTEN, GATE_E, MS_PROBLEM, MS_RELATED, GATE_F,
    MS_EVIDENCE, GATE_G, MS_SYNTH, GATE_H, MS_REWRITTEN, GATE_I, DONE,
)

TRANSITIONS: frozenset[tuple[str, str]] = frozenset({
    (MV_START, MV_RETRIEVED),
    (MV_RETRIEVED, GATE_A),
    (GATE_A, MV_CHUNKED),
    (MV_CHUNKED, MV_MOTIVATION),
    (MV_MOTIVATION, GATE_B),
    (GATE_B, GATE_C),
    (GATE_B, MV_VALIDATED),
    (GATE_C, MV_GAPS),
    (GATE_C, MV_VALIDATED),      # researcher overruled every Yes
    (MV_GAPS, GATE_D),
    (GATE_D, MV_REWRITTEN),
    (MV_REWRITTEN, GATE_E),
    (GATE_E, DONE),              # accept and finish
    (GATE_E, MV_RETRIEVED),      # accept and revalidate
    (GATE_E, GATE_D),            # reject: roll back, re-select gaps
    (MV_VALIDATED, MS_PROBLEM),
    (MS_PROBLEM, MS_RELATED),
    (MS_RELATED, GATE_F),
    (GATE_F, MS_EVIDENCE),
    (MS_EVIDENCE, GATE_G),
    (GATE_G, MS_SYNTH),
    (MS_SYNTH, GATE_H),
    (GATE_H, MS_REWRITTEN),
    (MS_REWRITTEN, GATE_I),
    (GATE_I, DONE),
    (GATE_I, GATE_H),            # reject: re-pick methods
})

GATE_STATES = {
    "A": GATE_A, "B": GATE_B, "C": GATE_C, "D": GATE_D, "E": GATE_E,
    "F": GATE_F, "G": GATE_G, "H": GATE_H, "I": GATE_I,
}
GATE_KIND_BY_STATE = {v: k for k, v in GATE_STATES.items()}

GATE_ALLOWED_OPS = {
    "A": ("add", "delete"),
    "B": ("add", "update", "delete"),
    "C": ("delete",),
    "D": ("add", "update", "delete"),
    "E": ("decision",),
    "F": ("add", "update", "delete"),
    "G": ("update", "delete"),
    "H": ("update", "delete"),
    "I": ("decision",),
}

QUESTION_PREFIX = "Is the research paper"

PROVENANCE_ORIGINAL = "original"
PROVENANCE_AGENT = "agent-rewritten"
PROVENANCE_RESEARCHER = "researcher-edited"


@dataclass(frozen=True)
class Proposal:
    title: str
    abstract: str
    version: int = 0
    provenance: str = PROVENANCE_ORIGINAL

    def __post_init__(self):
        if not self.title.strip():
            raise PreconditionError("proposal title must be non-empty")
        if not self.abstract.strip():
            raise PreconditionError("proposal abstract must be non-empty")
        if self.version < 0:
            raise PreconditionError("proposal version must be >= 0")

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "abstract": self.abstract,
            "version": self.version,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Proposal":
        return cls(
            title=d["title"],
            abstract=d["abstract"],
            version=int(d.get("version", 0)),
            provenance=d.get("provenance", PROVENANCE_ORIGINAL),
        )

    @property
    def text(self) -> str:
        """Binding form used wherever a template has a {proposal} slot."""
        return f"Title: {self.title}\nAbstract: {self.abstract}"


@dataclass(frozen=True)
class ValidationQuestion:
    question_id: str
    text: str
    source_motivation_bullet: str = ""
    status: str = "generated"  # generated | edited | added | deleted

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "text": self.text,
            "source_motivation_bullet": self.source_motivation_bullet,
            "status": self.status,
        }


@dataclass(frozen=True)
class ValidationVerdict:
    verdict_id: str
    question_id: str
    paper_id: str
    verdict: str  # Yes | No | Unanswerable
    justification: str | None = None
    supporting_chunk_ids: tuple[str, ...] = ()
    error: str | None = None  # fail-soft note when the provider gave out

    def to_dict(self) -> dict:
        return {
            "verdict_id": self.verdict_id,
            "question_id": self.question_id,
            "paper_id": self.paper_id,
            "verdict": self.verdict,
            "justification": self.justification,
            "supporting_chunk_ids": list(self.supporting_chunk_ids),
            "error": self.error,
        }


@dataclass(frozen=True)
class ResearchGap:
    gap_id: str
    paper_id: str  # empty for researcher-added gaps
    text: str
    origin: str = "agent"  # agent | researcher
    selected: bool = False

    def to_dict(self) -> dict:
        return {
            "gap_id": self.gap_id,
            "paper_id": self.paper_id,
            "text": self.text,
            "origin": self.origin,
            "selected": self.selected,
        }


@dataclass(frozen=True)
class RelatedProblem:
    problem_id: str
    kind: str  # similar | subtask
    text: str
    status: str = "generated"

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "kind": self.kind,
            "text": self.text,
            "status": self.status,
        }


@dataclass(frozen=True)
class MethodEvidence:
    evidence_id: str
    problem_id: str
    paper_id: str
    methodology_text: str
    accepted: bool = True

    def to_dict(self) -> dict:
        return {
            "evidence_id": self.evidence_id,
            "problem_id": self.problem_id,
            "paper_id": self.paper_id,
            "methodology_text": self.methodology_text,
            "accepted": self.accepted,
        }


@dataclass(frozen=True)
class SynthesizedMethod:
    method_id: str
    text: str
    evidence_ids: tuple[str, ...] = ()
    accepted: bool = True

    def to_dict(self) -> dict:
        return {
            "method_id": self.method_id,
            "text": self.text,
            "evidence_ids": list(self.evidence_ids),
            "accepted": self.accepted,
        }


@dataclass
class SessionState:
    """Snapshot derived purely by folding the event log. No timestamps here,
    so identical scripted runs produce bit-identical canonical forms."""

    session_id: str
    config: dict = field(default_factory=dict)
    state: str | None = None
    proposals: list[dict] = field(default_factory=list)  # accepted lineage
    candidate: dict | None = None
    loop_count: int = 0
    hits: list[dict] = field(default_factory=list)
    seen_papers: list[str] = field(default_factory=list)
    accepted_papers: list[str] = field(default_factory=list)
    indexed_counts: dict = field(default_factory=dict)
    motivation: list[str] = field(default_factory=list)
    motivation_flagged: bool = False
    questions: list[dict] = field(default_factory=list)
    verdicts: list[dict] = field(default_factory=list)
    kept_verdict_ids: list[str] = field(default_factory=list)
    gaps: list[dict] = field(default_factory=list)
    problem_statement: str | None = None
    problem_flagged: bool = False
    problems: list[dict] = field(default_factory=list)
    evidence: list[dict] = field(default_factory=list)
    evidence_retrieval: dict = field(default_factory=dict)
    unique_evidence_papers: int = 0
    methods: list[dict] = field(default_factory=list)
    pending_gate: dict | None = None
    resolved_gates: list[str] = field(default_factory=list)
    gate_seq: int = 0
    flags: dict = field(default_factory=dict)
    done_reason: str | None = None
    llm_calls: int = 0
    llm_outcomes: int = 0

    @property
    def current_proposal(self) -> Proposal | None:
        if not self.proposals:
            return None
        return Proposal.from_dict(self.proposals[-1])

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "config": self.config,
            "state": self.state,
            "proposals": self.proposals,
            "candidate": self.candidate,
            "loop_count": self.loop_count,
            "hits": self.hits,
            "seen_papers": self.seen_papers,
            "accepted_papers": self.accepted_papers,
            "indexed_counts": self.indexed_counts,
            "motivation": self.motivation,
            "motivation_flagged": self.motivation_flagged,
            "questions": self.questions,
            "verdicts": self.verdicts,
            "kept_verdict_ids": self.kept_verdict_ids,
            "gaps": self.gaps,
            "problem_statement": self.problem_statement,
            "problem_flagged": self.problem_flagged,
            "problems": self.problems,
            "evidence": self.evidence,
            "evidence_retrieval": self.evidence_retrieval,
            "unique_evidence_papers": self.unique_evidence_papers,
            "methods": self.methods,
            "pending_gate": self.pending_gate,
            "resolved_gates": self.resolved_gates,
            "gate_seq": self.gate_seq,
            "flags": self.flags,
            "done_reason": self.done_reason,
            "llm_calls": self.llm_calls,
            "llm_outcomes": self.llm_outcomes,
        }
