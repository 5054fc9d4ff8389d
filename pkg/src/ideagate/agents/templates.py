"""Prompt templates and rendering.

Templates P1-P11 are the production wording and must never drift: the test
suite holds golden transcripts and compares byte-for-byte. PX-relevance and
PX-method-rewrite are house-written (the two steps the template set does not
cover) and are marked non-verbatim so nothing ever golden-checks them.

A template is an ordered list of (role, text) segments; placeholders use
``{name}`` syntax and rendering with an unbound placeholder fails. Rendering
is pure and deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ideagate.errors import UnboundSlot, UnknownTemplate

ROLE_SYSTEM = "system"
ROLE_HUMAN = "human"
ROLE_AI = "ai"

COLLEAGUE = "colleague"
MENTOR = "mentor"

_PLACEHOLDER = re.compile(r"\{([a-z][a-z0-9_]*)\}")


@dataclass(frozen=True)
class Message:
    """One role-tagged turn of a rendered prompt."""

    role: str
    content: str

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content}


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    segments: tuple[tuple[str, str], ...]
    persona: str
    verbatim: bool = True

    @property
    def placeholders(self) -> frozenset[str]:
        names: set[str] = set()
        for _, text in self.segments:
            names.update(_PLACEHOLDER.findall(text))
        return frozenset(names)

    def render(self, bindings: dict[str, str]) -> list[Message]:
        """Substitute every placeholder; unbound slots are an error.

        Extra bindings are ignored so callers can bind a superset.
        """
        rendered: list[Message] = []
        for role, text in self.segments:
            def sub(m: re.Match) -> str:
                name = m.group(1)
                if name not in bindings:
                    raise UnboundSlot(self.template_id, name)
                return bindings[name]

            rendered.append(Message(role, _PLACEHOLDER.sub(sub, text)))
        return rendered


_SEGMENTS: dict[str, tuple[tuple[str, str], ...]] = {
    "P1": (
        ("system", "You are a researcher and trying to understand the following proposal written by another researcher:{proposal}"),
        ("human", "Describe in a bulleted list what is not addressed in the current literature which serves as the Motivation behind solving the above research problem proposed in the Proposal. Answer without a heading line and just the bullet points. Each bullet should mention one gap in the literature as a bullet point and not a sentence."),
    ),
    "P2": (
        ("system", "You are a researcher and trying to understand the following proposal written by another researcher:{proposal}"),
        ("human", "Describe in a bulleted list what is not addressed in the current literature which serves as the Motivation behind solving the above research problem proposed in the Proposal. Answer without a heading line and just the bullet points. Each bullet should mention one gap in the literature as a bullet point and not a sentence."),
        ("ai", "{motivation}"),
        ("human", "Convert each of the above bullets in to a binary question. The question should begin with 'Is the research paper'."),
    ),
    "P3": (
        ("system", (
            "You are a researcher. You have been given a context, which are paragraphs from a research paper. You have been given a question. Answer the given Question in 'Yes' OR 'No' OR 'Unanswerable'. Answer solely based on the provided context of the research paper. If the question can not be answered with the facts mentioned in the available context or there is any ambiguity in answering the question answer as 'Unanswerable'.\n"
            "Answer as 'Yes' only when the question can be very clearly answered considering the facts in the research paper provided in the context. Do not repeat the question as the part of the answer.\n"
            "Provide a concise explanation about how the answer to the question is 'Yes' mentioning the paragraphs used in the context to answer it as ‘Yes’. If the answer is 'No' or 'Unanswerable' only output that with NO description or elaboration."
        )),
        ("human", (
            "Question: {question}\n"
            "Research Paper Context: {paper_chunks}"
        )),
    ),
    "P4": (
        ("system", (
            "You are a researcher. You have been given the following proposal: {proposal}\n"
            "\n"
            "A different research paper provided in the context already addresses the gap mentioned as the motivation behind the proposal.\n"
            "{descriptions}"
        )),
        ("human", (
            "Research Paper: {paper_chunks}\n"
            "\n"
            "Identify the limitations or gaps of this research paper which can serve as the new motivation for the proposal. Provide a bulleted list of limitations, where each bullet is concise. Answer WITHOUT a heading line and just the bullet points."
        )),
    ),
    "P5": (
        ("system", "You are a researcher and have written a proposal: {proposal}"),
        ("human", (
            "Re-write the proposal by taking into consideration the mentioned gaps in the current literature as the new motivation behind of the problem defined in the proposal.\n"
            "Answer in a Single detailed paragraph WITHOUT any bullet points or list.\n"
            "Gaps in the current literature: {limitations}"
        )),
    ),
    "P6": (
        ("system", (
            "You are a researcher and trying to understand the following proposal written by another researcher:\n"
            "{proposal}"
        )),
        ("human", "What is the problem solved in the proposal?"),
    ),
    "P7": (
        ("system", (
            "You are a researcher and trying to understand the following proposal written by another researcher:\n"
            "{proposal}"
        )),
        ("human", "What is the problem solved in the proposal?"),
        ("ai", "{problem_statement}"),
        ("human", "Give me a bulleted list of a more generalised or similar problems to the problem defined in the proposal. Don't give a heading just the answer in a bulleted list."),
    ),
    "P8": (
        ("system", (
            "You are a researcher and trying to understand the following proposal written by another researcher:\n"
            "{proposal}"
        )),
        ("human", "What is the problem solved in the proposal?"),
        ("ai", "{problem_statement}"),
        ("human", "Provide a bulleted list of sub-problems or sub-tasks involved to solve the problem. Don't give a heading just the answer in a bulleted list."),
    ),
    "P9": (
        ("human", (
            "{statement}\n"
            "For the statement given above generate a question to be posed on a research paper to find out if the paper is proposing an approach or method to perform the task defined by the statement. Start the question with: 'Is the research paper proposing an approach or method to'."
        )),
    ),
    "P10": (
        ("system", (
            "You are a researcher and trying to answer the question posed on a research paper provided as the context.\n"
            "Research Paper: {paper_chunks}"
        )),
        ("human", (
            "Answer the given Question in 'Yes' OR 'No' OR 'Unanswerable'. Answer solely based on the provided context of the research paper. If the question can not be answered with the facts mentioned in the available context or there is any ambiguity in answering the question, answer as 'Unanswerable'. Answer as 'Yes' only when the question can be very clearly answered considering the facts in the research paper provided in the context. Do not repeat the question as the part of the answer. If the answer to the question is 'Yes', provide detailed  approach or methodology to perform the task. If the answer is 'No' or 'Unanswerable' only output that with NO description.\n"
            "\n"
            "Question: {question}"
        )),
    ),
    "P11": (
        ("system", (
            "You are a researcher and have been given a proposal and the research problem the proposal is trying to solve. You have been given the approaches in the literature trying to solve, similar problems and sub problems or sub tasks of the problem defined in the proposal. Your task is to synthesize and propose a possible set of methods or approaches to solve the problem defined in the proposal.\n"
            "Proposal: {proposal}\n"
            "Research Problem in the Proposal: {problem}"
        )),
        ("human", (
            "{method_context}\n"
            "\n"
            "Based on the above information suggest the top {method_count} possible methods or approaches to solve the problem defined in the proposal."
        )),
    ),
    # House-written: per-hit relevance description shown at the paper-review gate.
    "PX-relevance": (
        ("system", "You are a researcher and have written a proposal: {proposal}"),
        ("human", (
            "A candidate related research paper is given below.\n"
            "Title: {title}\n"
            "Abstract: {abstract}\n"
            "Describe in one or two sentences the relevance of this research paper to the proposal."
        )),
    ),
    # House-written: final rewrite folding the accepted methods into the proposal.
    "PX-method-rewrite": (
        ("system", "You are a researcher and have written a proposal: {proposal}"),
        ("human", (
            "Re-write the proposal by taking into consideration the mentioned methods as the proposed approach for the problem defined in the proposal.\n"
            "Answer in a Single detailed paragraph WITHOUT any bullet points or list.\n"
            "Proposed methods: {methods}"
        )),
    ),
}

# Extraction, question generation, grounded QA, and relevance blurbs run on the
# cheaper tier; limitation analysis, problem generation, synthesis, and rewrites
# need the reasoning tier.
_PERSONA: dict[str, str] = {
    "P1": COLLEAGUE,
    "P2": COLLEAGUE,
    "P3": COLLEAGUE,
    "P4": MENTOR,
    "P5": MENTOR,
    "P6": COLLEAGUE,
    "P7": MENTOR,
    "P8": MENTOR,
    "P9": COLLEAGUE,
    "P10": COLLEAGUE,
    "P11": MENTOR,
    "PX-relevance": COLLEAGUE,
    "PX-method-rewrite": MENTOR,
}

VERBATIM_IDS = tuple(f"P{i}" for i in range(1, 12))

TEMPLATES: dict[str, PromptTemplate] = {
    tid: PromptTemplate(
        template_id=tid,
        segments=segs,
        persona=_PERSONA[tid],
        verbatim=tid in set(VERBATIM_IDS),
    )
    for tid, segs in _SEGMENTS.items()
}


def get_template(template_id: str) -> PromptTemplate:
    try:
        return TEMPLATES[template_id]
    except KeyError:
        raise UnknownTemplate(f"unknown template id {template_id!r}") from None


def render_prompt(template_id: str, bindings: dict[str, str]) -> list[Message]:
    """Render a template to an ordered message list. Deterministic."""
    return get_template(template_id).render(bindings)


_LABELS = {ROLE_SYSTEM: "System Message:", ROLE_HUMAN: "Human Message:", ROLE_AI: "AI Message:"}


def transcript(messages: list[Message]) -> str:
    """Canonical plain-text form of a message list.

    Used for golden comparison and for scripted-provider pattern matching.
    """
    return "\n\n".join(f"{_LABELS[m.role]}\n{m.content}" for m in messages)
