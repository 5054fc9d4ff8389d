"""Workflow driver: executes both ideation workflows as resumable state
machines with a researcher gate between every agent step.

Every mutation is an event: the engine validates it against the reducer on a
state copy, persists it (write-ahead), then commits the copy as live state.
Live state is therefore always the fold of the log, and replay cannot
diverge. Gate submissions that would strand the workflow (no questions left,
nothing selected) are rejected before anything is persisted.

Pair fan-out (question x paper, problem x paper) executes under the
provider's concurrency limit, but per-pair llm events are buffered and
appended in deterministic input order, so identical scripted runs produce
identical logs.
"""

from __future__ import annotations

import difflib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ideagate.agents.parsing import parse_binary_answer, parse_bullets
from ideagate.agents.runtime import AgentRuntime, CompletionResult
from ideagate.agents.templates import get_template
from ideagate.corpus.index import CorpusIndex
from ideagate.corpus.records import iter_pseudo_body, resolve_full_text
from ideagate.docproc.chunking import Chunk, Tokenizer, WHITESPACE
from ideagate.docproc.segment import segment_paragraphs
from ideagate.docproc.user_corpus import UserCorpus
from ideagate.errors import (
    BudgetExhausted,
    GateRejected,
    NotFound,
    PreconditionError,
    ProviderError,
)
from ideagate.session.store import SessionStore
from ideagate.workflow import model as m
from ideagate.workflow import reducer
from ideagate.workflow.model import (
    MethodEvidence,
    Proposal,
    RelatedProblem,
    ResearchGap,
    SessionState,
    SynthesizedMethod,
    ValidationQuestion,
    ValidationVerdict,
)


@dataclass(frozen=True)
class EngineConfig:
    k_papers: int = 50
    k_per_problem: int = 10
    k_small: int = 5
    max_tokens: int = 512
    loop_cap: int = 5
    n_methods: int = 3
    call_budget: int = 3

    def to_dict(self) -> dict:
        return {
            "k_papers": self.k_papers,
            "k_per_problem": self.k_per_problem,
            "k_small": self.k_small,
            "max_tokens": self.max_tokens,
            "loop_cap": self.loop_cap,
            "n_methods": self.n_methods,
            "call_budget": self.call_budget,
        }


def format_chunks(chunks: list[Chunk]) -> str:
    """Paragraph-numbered context block bound to {paper_chunks} slots."""
    return "\n\n".join(f"Paragraph {i}: {c.text}" for i, c in enumerate(chunks, start=1))


def bullet_block(lines: list[str]) -> str:
    return "\n".join(f"- {line}" for line in lines)


def word_diff(old: str, new: str) -> list[dict]:
    """Compact word-level diff for rewrite gate payloads."""
    ops = []
    matcher = difflib.SequenceMatcher(a=old.split(), b=new.split(), autojunk=False)
    for tag, a0, a1, b0, b1 in matcher.get_opcodes():
        ops.append({
            "op": tag,
            "old": " ".join(matcher.a[a0:a1]),
            "new": " ".join(matcher.b[b0:b1]),
        })
    return ops


class WorkflowEngine:
    """One engine instance drives one session."""

    def __init__(
        self,
        session_id: str,
        store: SessionStore,
        corpus: CorpusIndex,
        runtime: AgentRuntime,
        embedder,
        config: EngineConfig | None = None,
        corpus_dir: str | Path | None = None,
        tokenizer: Tokenizer = WHITESPACE,
        creator: str = "researcher",
    ):
        self.session_id = session_id
        self.store = store
        self.corpus = corpus
        self.runtime = runtime
        self.embedder = embedder
        self.config = config or EngineConfig()
        self.corpus_dir = Path(corpus_dir) if corpus_dir else None
        self.user_corpus = UserCorpus(
            session_id, embedder, max_tokens=self.config.max_tokens, tokenizer=tokenizer
        )
        self.state = SessionState(session_id=session_id)
        self._relevance_cache: dict[tuple[str, int], str] = {}
        snapshot = {
            "engine": self.config.to_dict(),
            "personas": {
                p: {
                    "provider_id": c.provider_id,
                    "model_name": c.model_name,
                    "temperature": c.temperature,
                    "max_output_tokens": c.max_output_tokens,
                }
                for p, c in runtime.personas.items()
            },
            "embedding_model": embedder.model_id,
        }
        store.create_session(session_id, creator=creator, config=snapshot)
        self._emit(
            "system",
            "state-transition",
            {"from": None, "to": m.MV_START, "session_id": session_id, "config": snapshot},
        )

    # ------------------------------------------------------------------
    # event plumbing
    # ------------------------------------------------------------------

    def _emit(self, actor: str, kind: str, payload: dict) -> None:
        """Validate against the reducer, persist, then commit."""
        new_state = reducer.apply_event(self.state, kind, payload, actor)
        self.store.append_event(self.session_id, actor, kind, payload)
        self.state = new_state

    def _transition(self, to: str, extra: dict | None = None, actor: str = "system") -> None:
        payload = {"from": self.state.state, "to": to}
        if extra:
            payload.update(extra)
        self._emit(actor, "state-transition", payload)

    def _llm_events(self, template_id: str, bindings: dict, context: dict, fail_soft: bool):
        """Run one template call; return (result_or_None, events to append)."""
        template = get_template(template_id)
        messages = template.render(bindings)
        events: list[tuple[str, str, dict]] = [(
            template.persona,
            "llm-call",
            {
                "persona": template.persona,
                "template_id": template_id,
                "messages": [msg.to_dict() for msg in messages],
                "context": context,
            },
        )]
        try:
            result = self.runtime.complete(
                template.persona, template_id, messages, self.config.call_budget
            )
        except (BudgetExhausted, ProviderError) as exc:
            events.append((
                "system",
                "error",
                {
                    "for_call": True,
                    "template_id": template_id,
                    "persona": template.persona,
                    "detail": str(exc),
                    "context": context,
                },
            ))
            if fail_soft:
                return None, events
            for actor, kind, payload in events:
                self._emit(actor, kind, payload)
            raise
        events.append((
            template.persona,
            "llm-response",
            {
                "persona": template.persona,
                "template_id": template_id,
                "raw": result.text,
                "latency_s": round(result.latency_s, 6),
                "attempts": result.attempts,
                "context": context,
            },
        ))
        return result, events

    def _llm(
        self, template_id: str, bindings: dict, context: dict, fail_soft: bool = False
    ) -> CompletionResult | None:
        result, events = self._llm_events(template_id, bindings, context, fail_soft)
        for actor, kind, payload in events:
            self._emit(actor, kind, payload)
        return result

    def _fan_out(self, tasks, persona: str):
        """Run tasks under the persona provider's concurrency limit.

        Each task returns (value, events); events are appended in input
        order after all tasks finish, keeping the log deterministic.
        """
        provider_id = self.runtime.personas[persona].provider_id
        workers = max(1, getattr(self.runtime.providers[provider_id], "max_concurrency", 1))
        if workers <= 1 or len(tasks) <= 1:
            outcomes = [task() for task in tasks]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(lambda fn: fn(), tasks))
        values = []
        for value, events in outcomes:
            for actor, kind, payload in events:
                self._emit(actor, kind, payload)
            values.append(value)
        return values

    # ------------------------------------------------------------------
    # gate plumbing
    # ------------------------------------------------------------------

    def _open_gate(self, kind: str, items: list[dict], payload: dict | None = None) -> None:
        envelope = {
            "session_id": self.session_id,
            "gate_id": f"{self.session_id}:g{self.state.gate_seq + 1}",
            "kind": kind,
            "items": items,
            "payload": payload or {},
            "allowed_ops": list(m.GATE_ALLOWED_OPS[kind]),
        }
        self._emit("system", "gate-open", {"envelope": envelope})

    def pending_gate(self) -> dict | None:
        return self.state.pending_gate

    def apply_gate_edits(
        self, gate_id: str, edits: list[dict] | None = None, decision: str | None = None,
        edited_title: str | None = None, edited_abstract: str | None = None,
    ) -> SessionState:
        """Resolve the pending gate and advance to the next gate or terminal.

        Edits apply atomically: any invalid edit, stale gate id, or
        resolution that would strand the workflow rejects the whole
        submission with state unchanged.
        """
        envelope = self.state.pending_gate
        if envelope is None:
            raise GateRejected("no gate is pending")
        if gate_id != envelope.get("gate_id"):
            raise GateRejected(
                f"stale gate id {gate_id!r}; pending gate is {envelope.get('gate_id')!r}"
            )
        kind = envelope["kind"]
        payload = {"gate_id": gate_id, "edits": edits or []}
        if decision is not None:
            payload["decision"] = decision
        if edited_title is not None:
            payload["edited_title"] = edited_title
        if edited_abstract is not None:
            payload["edited_abstract"] = edited_abstract
        # dry-run on a copy, then resolution checks, then persist
        resolved = reducer.apply_event(self.state, "gate-edit", payload, "researcher")
        self._check_resolution(kind, resolved)
        self.store.append_event(self.session_id, "researcher", "gate-edit", payload)
        self.state = resolved
        self._advance_after_gate(kind, decision)
        return self.state

    @staticmethod
    def _check_resolution(kind: str, resolved: SessionState) -> None:
        if kind == "B" and not [q for q in resolved.questions if q["status"] != "deleted"]:
            raise GateRejected("at least one active question is required to validate")
        if kind == "D" and not [g for g in resolved.gaps if g["selected"]]:
            raise GateRejected("select or add at least one research gap")
        if kind == "F" and not [p for p in resolved.problems if p["status"] != "deleted"]:
            raise GateRejected("at least one active problem is required")
        if kind == "H" and not [x for x in resolved.methods if x["accepted"]]:
            raise GateRejected("at least one accepted method is required")

    def _advance_after_gate(self, kind: str, decision: str | None) -> None:
        if kind == "A":
            self._after_gate_a()
        elif kind == "B":
            self.validate_motivation()
        elif kind == "C":
            self._after_gate_c()
        elif kind == "D":
            self.rewrite_proposal()
        elif kind == "E":
            self._after_gate_e(decision)
        elif kind == "F":
            self.gather_method_evidence()
        elif kind == "G":
            self.synthesize_methods()
        elif kind == "H":
            self.rewrite_with_methods()
        elif kind == "I":
            self._after_gate_i(decision)

    # ------------------------------------------------------------------
    # motivation validation
    # ------------------------------------------------------------------

    def start_motivation_validation(self, proposal: Proposal, k_papers: int | None = None) -> SessionState:
        if self.state.state != m.MV_START:
            raise PreconditionError(f"cannot start validation from state {self.state.state!r}")
        k = k_papers or self.config.k_papers
        hits = self.corpus.retrieve_topk(proposal.text, k, self.embedder)
        self._transition(
            m.MV_RETRIEVED,
            {
                "proposal": proposal.to_dict(),
                "k_papers": k,
                "loop_count": 0,
                "hits": [h.to_dict() for h in hits],
            },
        )
        self._open_paper_gate()
        return self.state

    def _open_paper_gate(self) -> None:
        proposal = self.state.current_proposal
        items = []
        tasks = []
        hit_rows = list(self.state.hits)
        for hit in hit_rows:
            pid = hit["paper_id"]
            cache_key = (pid, proposal.version)

            def make_task(paper_id=pid, key=cache_key):
                def task():
                    if key in self._relevance_cache:
                        return self._relevance_cache[key], []
                    record = self.corpus.lookup_paper(paper_id)
                    result, events = self._llm_events(
                        "PX-relevance",
                        {"proposal": proposal.text, "title": record.title, "abstract": record.abstract},
                        {"purpose": "relevance", "paper_id": paper_id, "proposal_version": proposal.version},
                        fail_soft=True,
                    )
                    text = result.text.strip() if result else ""
                    self._relevance_cache[key] = text
                    return text, events
                return task

            tasks.append(make_task())
        relevance = self._fan_out(tasks, "colleague") if tasks else []
        for hit, desc in zip(hit_rows, relevance):
            record = self.corpus.lookup_paper(hit["paper_id"])
            items.append({
                "paper_id": hit["paper_id"],
                "title": record.title,
                "abstract": record.abstract,
                "score": hit["score"],
                "rank": hit["rank"],
                "relevance": desc,
                "previously_seen": hit["paper_id"] in self.state.seen_papers,
            })
        payload = {}
        if not items:
            payload["add_papers_required"] = True
        self._transition(m.GATE_A, {})
        self._open_gate("A", items, payload)

    def _paper_body(self, paper_id: str, title: str = "", abstract: str = "") -> str:
        try:
            record = self.corpus.lookup_paper(paper_id)
        except NotFound:
            record = None
        if record is not None:
            body = resolve_full_text(record, self.corpus_dir)
            if body is not None:
                return body
            return iter_pseudo_body(record)
        if title or abstract:
            return f"{title}\n\n{abstract}" if abstract else title
        return paper_id

    def _after_gate_a(self) -> None:
        items_by_id = {i["paper_id"]: i for i in self.state.hits}
        accepted = list(self.state.accepted_papers)
        self.user_corpus.allow_papers(accepted)
        indexed: dict[str, int] = {}
        for pid in accepted:
            hit = items_by_id.get(pid, {})
            body = self._paper_body(pid, hit.get("title", ""), hit.get("abstract", ""))
            doc = segment_paragraphs(body, pid)
            indexed[pid] = self.user_corpus.index_chunks(doc)
        self._transition(m.MV_CHUNKED, {"indexed": indexed, "accepted_papers": accepted})
        self.extract_motivation()
        self.generate_questions()

    def extract_motivation(self) -> SessionState:
        if self.state.state != m.MV_CHUNKED:
            raise PreconditionError(f"cannot extract motivation in state {self.state.state!r}")
        proposal = self.state.current_proposal
        result = self._llm("P1", {"proposal": proposal.text}, {"purpose": "motivation"})
        bullets = parse_bullets(result.text)
        self._transition(
            m.MV_MOTIVATION,
            {"bullets": list(bullets.items), "flagged": bullets.empty},
        )
        return self.state

    def generate_questions(self) -> SessionState:
        if self.state.state != m.MV_MOTIVATION:
            raise PreconditionError(f"cannot generate questions in state {self.state.state!r}")
        proposal = self.state.current_proposal
        items: list[dict] = []
        if self.state.motivation:
            result = self._llm(
                "P2",
                {"proposal": proposal.text, "motivation": bullet_block(self.state.motivation)},
                {"purpose": "questions"},
            )
            bullets = parse_bullets(result.text)
            for i, text in enumerate(bullets.items, start=1):
                auto_prefixed = False
                if not text.startswith(m.QUESTION_PREFIX):
                    text = f"{m.QUESTION_PREFIX} {text}"
                    auto_prefixed = True
                bullet = self.state.motivation[i - 1] if i <= len(self.state.motivation) else ""
                q = ValidationQuestion(
                    question_id=f"q{self.state.loop_count}.{i}",
                    text=text,
                    source_motivation_bullet=bullet,
                ).to_dict()
                if auto_prefixed:
                    q["auto_prefixed"] = True
                items.append(q)
        self._transition(m.GATE_B, {})
        payload = {} if items else {"authoring_required": True}
        self._open_gate("B", items, payload)
        return self.state

    def validate_motivation(self, k_small: int | None = None) -> SessionState:
        if self.state.state != m.GATE_B or self.state.pending_gate is not None:
            raise PreconditionError("validation requires a resolved question gate")
        k = k_small or self.config.k_small
        questions = [q for q in self.state.questions if q["status"] != "deleted"]
        papers = list(self.state.accepted_papers)
        tasks = []
        for q in questions:
            for pid in papers:
                def make_task(question=q, paper_id=pid):
                    def task():
                        verdict_id = f"{question['question_id']}::{paper_id}"
                        context = {
                            "question_id": question["question_id"],
                            "paper_id": paper_id,
                            "verdict_id": verdict_id,
                        }
                        ranked = self.user_corpus.retrieve_chunks(paper_id, question["text"], k)
                        chunks = [c for c, _ in ranked]
                        result, events = self._llm_events(
                            "P3",
                            {"question": question["text"], "paper_chunks": format_chunks(chunks)},
                            context,
                            fail_soft=True,
                        )
                        if result is None:
                            verdict = ValidationVerdict(
                                verdict_id=verdict_id,
                                question_id=question["question_id"],
                                paper_id=paper_id,
                                verdict="Unanswerable",
                                error="provider failed after retries",
                            )
                        else:
                            answer = parse_binary_answer(result.text)
                            verdict = ValidationVerdict(
                                verdict_id=verdict_id,
                                question_id=question["question_id"],
                                paper_id=paper_id,
                                verdict=answer.verdict,
                                justification=answer.justification,
                                supporting_chunk_ids=tuple(c.chunk_id for c in chunks)
                                if answer.is_yes
                                else (),
                            )
                        return verdict.to_dict(), events
                    return task
                tasks.append(make_task())
        verdicts = self._fan_out(tasks, "colleague")
        yes = [v for v in verdicts if v["verdict"] == "Yes"]
        if not yes:
            self._transition(
                m.MV_VALIDATED,
                {
                    "verdicts": verdicts,
                    "yes_count": 0,
                    "notice": "motivation of the proposal is validated",
                },
            )
            return self.state
        self._transition(m.GATE_C, {"verdicts": verdicts, "yes_count": len(yes)})
        self._open_gate("C", yes)
        return self.state

    def _after_gate_c(self) -> None:
        kept_ids = set(self.state.kept_verdict_ids)
        kept = [v for v in self.state.verdicts if v["verdict_id"] in kept_ids]
        if not kept:
            self._transition(
                m.MV_VALIDATED,
                {
                    "yes_count": 0,
                    "notice": "motivation of the proposal is validated",
                },
            )
            return
        self.extract_limitations(kept)

    def extract_limitations(self, kept: list[dict]) -> SessionState:
        if self.state.state != m.GATE_C or self.state.pending_gate is not None:
            raise PreconditionError("limitation extraction requires a resolved verdict gate")
        proposal = self.state.current_proposal
        question_text = {q["question_id"]: q["text"] for q in self.state.questions}
        papers: list[str] = []
        for v in kept:
            if v["paper_id"] not in papers:
                papers.append(v["paper_id"])
        tasks = []
        for pid in papers:
            def make_task(paper_id=pid):
                def task():
                    related = [v for v in kept if v["paper_id"] == paper_id]
                    descriptions = "\n".join(
                        f"Question: {question_text.get(v['question_id'], '')}\n"
                        f"Justification: {v['justification'] or ''}"
                        for v in related
                    )
                    chunks = self.user_corpus.get_chunks(paper_id)
                    result, events = self._llm_events(
                        "P4",
                        {
                            "proposal": proposal.text,
                            "descriptions": descriptions,
                            "paper_chunks": format_chunks(chunks),
                        },
                        {"purpose": "limitations", "paper_id": paper_id},
                        fail_soft=True,
                    )
                    bullets = parse_bullets(result.text) if result else None
                    return (paper_id, list(bullets.items) if bullets else []), events
                return task
            tasks.append(make_task())
        groups = self._fan_out(tasks, "mentor")
        gaps: list[dict] = []
        counter = 1
        for paper_id, texts in groups:
            for text in texts:
                gaps.append(
                    ResearchGap(
                        gap_id=f"gap{self.state.loop_count}.{counter}",
                        paper_id=paper_id,
                        text=text,
                    ).to_dict()
                )
                counter += 1
        self._transition(m.MV_GAPS, {"gaps": gaps, "paper_groups": [p for p, _ in groups]})
        self._transition(m.GATE_D, {})
        self._open_gate("D", gaps, {"paper_groups": [p for p, _ in groups]})
        return self.state

    def rewrite_proposal(self) -> SessionState:
        if self.state.state != m.GATE_D or self.state.pending_gate is not None:
            raise PreconditionError("rewriting requires a resolved gap gate")
        selected = [g for g in self.state.gaps if g["selected"]]
        if not selected:
            raise PreconditionError("at least one selected gap is required")
        proposal = self.state.current_proposal
        result = self._llm(
            "P5",
            {"proposal": proposal.text, "limitations": bullet_block([g["text"] for g in selected])},
            {"purpose": "rewrite", "selected_gaps": [g["gap_id"] for g in selected]},
        )
        candidate = Proposal(
            title=proposal.title,
            abstract=" ".join(result.text.split()),
            version=proposal.version + 1,
            provenance=m.PROVENANCE_AGENT,
        )
        diff = word_diff(proposal.abstract, candidate.abstract)
        self._transition(m.MV_REWRITTEN, {"candidate": candidate.to_dict(), "diff": diff})
        self._transition(m.GATE_E, {})
        self._open_gate(
            "E",
            [],
            {"current": proposal.to_dict(), "candidate": candidate.to_dict(), "diff": diff},
        )
        return self.state

    def _after_gate_e(self, decision: str | None) -> None:
        if decision == "reject":
            self._transition(m.GATE_D, {"reopened": True})
            self._open_gate("D", list(self.state.gaps))
            return
        if decision == "accept":
            self._transition(m.DONE, {"reason": "gate-e-accept"})
            return
        self.iterate_validation()

    def iterate_validation(self) -> SessionState:
        if self.state.state != m.GATE_E or self.state.pending_gate is not None:
            raise PreconditionError("iteration requires a resolved proposal gate")
        if self.state.loop_count >= self.config.loop_cap:
            self._transition(
                m.DONE,
                {
                    "reason": "loop-cap",
                    "flags": {"halted_at_loop_cap": True, "loop_cap": self.config.loop_cap},
                },
            )
            return self.state
        proposal = self.state.current_proposal
        hits = self.corpus.retrieve_topk(proposal.text, self.config.k_papers, self.embedder)
        self._transition(
            m.MV_RETRIEVED,
            {"loop_count": self.state.loop_count + 1, "hits": [h.to_dict() for h in hits]},
        )
        self._open_paper_gate()
        return self.state

    # ------------------------------------------------------------------
    # method synthesis
    # ------------------------------------------------------------------

    def start_method_synthesis(self) -> SessionState:
        if self.state.state != m.MV_VALIDATED:
            raise PreconditionError(
                f"method synthesis starts from {m.MV_VALIDATED!r}, not {self.state.state!r}"
            )
        proposal = self.state.current_proposal
        result = self._llm("P6", {"proposal": proposal.text}, {"purpose": "problem"})
        problem = result.text.strip()
        self._transition(
            m.MS_PROBLEM, {"problem_statement": problem, "flagged": not problem}
        )
        problems: list[dict] = []
        counter = 1
        for template_id, kind in (("P7", "similar"), ("P8", "subtask")):
            res = self._llm(
                template_id,
                {"proposal": proposal.text, "problem_statement": problem},
                {"purpose": f"{kind}-problems"},
            )
            for text in parse_bullets(res.text).items:
                problems.append(
                    RelatedProblem(problem_id=f"prob.{counter}", kind=kind, text=text).to_dict()
                )
                counter += 1
        self._transition(m.MS_RELATED, {"problems": problems})
        self._transition(m.GATE_F, {})
        payload = {"problem_statement": self.state.problem_statement}
        if self.state.problem_flagged:
            payload["authoring_required"] = True
        self._open_gate("F", problems, payload)
        return self.state

    def gather_method_evidence(
        self, k_per_problem: int | None = None, k_small: int | None = None
    ) -> SessionState:
        if self.state.state != m.GATE_F or self.state.pending_gate is not None:
            raise PreconditionError("evidence gathering requires a resolved problem gate")
        k_papers = k_per_problem or self.config.k_per_problem
        k_chunks = k_small or self.config.k_small
        problems = [p for p in self.state.problems if p["status"] != "deleted"]

        retrieval: dict[str, list[str]] = {}
        best_scores: dict[str, float] = {}
        paper_order: list[str] = []
        for problem in problems:
            hits = self.corpus.retrieve_topk(problem["text"], k_papers, self.embedder)
            retrieval[problem["problem_id"]] = [h.paper_id for h in hits]
            for h in hits:
                if h.paper_id not in best_scores:
                    paper_order.append(h.paper_id)
                    best_scores[h.paper_id] = h.score
                else:
                    best_scores[h.paper_id] = max(best_scores[h.paper_id], h.score)

        self.user_corpus.allow_papers(paper_order)
        for pid in paper_order:
            if not self.user_corpus.is_indexed(pid):
                doc = segment_paragraphs(self._paper_body(pid), pid)
                self.user_corpus.index_chunks(doc)

        # one generated question per problem
        question_tasks = []
        for problem in problems:
            def make_qtask(p=problem):
                def task():
                    result, events = self._llm_events(
                        "P9",
                        {"statement": p["text"]},
                        {"purpose": "evidence-question", "problem_id": p["problem_id"]},
                        fail_soft=True,
                    )
                    return (p["problem_id"], result.text.strip() if result else None), events
                return task
            question_tasks.append(make_qtask(problem))
        questions = dict(self._fan_out(question_tasks, "colleague"))

        pair_tasks = []
        for problem in problems:
            question = questions.get(problem["problem_id"])
            if question is None:
                continue
            for pid in retrieval[problem["problem_id"]]:
                def make_task(p=problem, paper_id=pid, q=question):
                    def task():
                        context = {
                            "problem_id": p["problem_id"],
                            "paper_id": paper_id,
                            "purpose": "evidence",
                        }
                        ranked = self.user_corpus.retrieve_chunks(paper_id, q, k_chunks)
                        chunks = [c for c, _ in ranked]
                        result, events = self._llm_events(
                            "P10",
                            {"paper_chunks": format_chunks(chunks), "question": q},
                            context,
                            fail_soft=True,
                        )
                        if result is None:
                            return None, events
                        answer = parse_binary_answer(result.text)
                        if not answer.is_yes:
                            return None, events
                        evidence = MethodEvidence(
                            evidence_id=f"ev.{p['problem_id']}.{paper_id}",
                            problem_id=p["problem_id"],
                            paper_id=paper_id,
                            methodology_text=answer.justification or "",
                        )
                        return evidence.to_dict(), events
                    return task
                pair_tasks.append(make_task())
        evidence = [e for e in self._fan_out(pair_tasks, "colleague") if e is not None]
        self._transition(
            m.MS_EVIDENCE,
            {
                "evidence": evidence,
                "retrieval": retrieval,
                "unique_papers": len(paper_order),
            },
        )
        self._transition(m.GATE_G, {})
        self._open_gate("G", evidence, {"unique_papers": len(paper_order)})
        return self.state

    def synthesize_methods(self, n_methods: int | None = None) -> SessionState:
        if self.state.state != m.GATE_G or self.state.pending_gate is not None:
            raise PreconditionError("synthesis requires a resolved evidence gate")
        n = n_methods or self.config.n_methods
        proposal = self.state.current_proposal
        accepted = [e for e in self.state.evidence if e["accepted"]]
        problem_text = {p["problem_id"]: p["text"] for p in self.state.problems}
        if accepted:
            blocks = [
                f"Problem: {problem_text.get(e['problem_id'], '')}\n"
                f"Approach in the literature: {e['methodology_text']}"
                for e in accepted
            ]
            method_context = "\n\n".join(blocks)
        else:
            method_context = (
                "No approaches were accepted from the literature; "
                "rely on parametric knowledge."
            )
        result = self._llm(
            "P11",
            {
                "proposal": proposal.text,
                "problem": self.state.problem_statement or "",
                "method_context": method_context,
                "method_count": str(n),
            },
            {"purpose": "synthesis", "evidence_ids": [e["evidence_id"] for e in accepted]},
        )
        bullets = parse_bullets(result.text)
        evidence_ids = tuple(e["evidence_id"] for e in accepted)
        methods = [
            SynthesizedMethod(
                method_id=f"m.{i}", text=text, evidence_ids=evidence_ids
            ).to_dict()
            for i, text in enumerate(bullets.items, start=1)
        ]
        extra = {"methods": methods, "requested": n, "produced": len(methods)}
        if len(methods) < n:
            extra["short_of_request"] = True
        self._transition(m.MS_SYNTH, extra)
        self._transition(m.GATE_H, {})
        self._open_gate("H", methods)
        return self.state

    def rewrite_with_methods(self) -> SessionState:
        if self.state.state != m.GATE_H or self.state.pending_gate is not None:
            raise PreconditionError("the method rewrite requires a resolved method gate")
        accepted = [x for x in self.state.methods if x["accepted"]]
        if not accepted:
            raise PreconditionError("at least one accepted method is required")
        proposal = self.state.current_proposal
        result = self._llm(
            "PX-method-rewrite",
            {"proposal": proposal.text, "methods": bullet_block([x["text"] for x in accepted])},
            {"purpose": "method-rewrite", "method_ids": [x["method_id"] for x in accepted]},
        )
        candidate = Proposal(
            title=proposal.title,
            abstract=" ".join(result.text.split()),
            version=proposal.version + 1,
            provenance=m.PROVENANCE_AGENT,
        )
        diff = word_diff(proposal.abstract, candidate.abstract)
        self._transition(m.MS_REWRITTEN, {"candidate": candidate.to_dict()})
        self._transition(m.GATE_I, {})
        self._open_gate(
            "I",
            [],
            {"current": proposal.to_dict(), "candidate": candidate.to_dict(), "diff": diff},
        )
        return self.state

    def _after_gate_i(self, decision: str | None) -> None:
        if decision == "reject":
            self._transition(m.GATE_H, {"reopened": True})
            self._open_gate("H", list(self.state.methods))
            return
        self._transition(m.DONE, {"reason": "gate-i-accept"})
