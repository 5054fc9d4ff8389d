"""Builders for the two golden replay fixtures.

Corpus texts are engineered around the hash embedding's bag-of-tokens
geometry: a document that repeats a query's marker tokens dominates every
document sharing none, so the designed retrieval sets are stable. Marker
tokens are fixed-width so substring matching in fixtures cannot collide.

Replay A (peer-review flavor): 50 papers retrieved, one validation question,
5 Yes verdicts, researcher deletes one, 4 gap groups, rewrite, accept-with-
edit, Done.

Replay B (evaluation-metric flavor): 50 papers, one question, zero Yes,
terminal validation; then method synthesis with 4 similar + 2 subtask
problems, 6x10 retrieval slots deduping to 40 unique papers, 17 evidence
items, 11 accepted, 10 synthesized methods, final rewrite, Done.
"""

from __future__ import annotations

import json
from pathlib import Path

from ideagate.corpus.records import PaperRecord, write_corpus_file

# ---------------------------------------------------------------------------
# Replay A
# ---------------------------------------------------------------------------

A_PROPOSAL = {
    "title": "Dataset for the computational study of peer reviews",
    "abstract": (
        "peer review requires expertise and is susceptible to errors and biases "
        "but the lack of clearly licensed datasets and multi domain corpora "
        "prevents systematic study so we plan an ethically sourced corpus of "
        "papers and review reports from five venues"
    ),
}

A_QUESTION = (
    "Is the research paper addressing the lack of clearly licensed datasets "
    "for studying natural language processing for peer review?"
)

A_YES_PAPERS = ("pkA03", "pkA11", "pkA24", "pkA37", "pkA48")
A_DELETED_AT_C = "pkA24"

A_GAPS = {
    "pkA03": [
        "does not contain blind reviewing data",
        "no extensive hyper parameter search",
        "no safeguard against lazy reading",
    ],
    "pkA11": [
        "models used are relatively simple",
        "demographic biases left unexplored",
        "no multi domain corpus provided",
    ],
    "pkA37": [
        "no causal conclusions drawn from the fairness analysis",
        "effect of rebuttals not investigated",
        "continual learning in language models not analysed",
    ],
    "pkA48": [
        "multidisciplinary bias of the method",
        "input limits cap the usable review length",
        "attention performance degrades with input length",
    ],
}

A_REWRITE = (
    "The current literature presents several gaps that motivate a broader "
    "approach to language processing for peer review: the absence of blind "
    "reviewing data, the unexplored effect of rebuttals, and the input limits "
    "of existing models. To address these gaps we propose an ethically sourced "
    "multi domain corpus of papers and review reports from five venues."
)

A_FINAL_EDIT = (
    "The absence of blind reviewing data, the unexplored effect of rebuttals, "
    "and the input limits of existing language models prevent systematic study "
    "of peer review. We therefore introduce an ethically sourced multi domain "
    "corpus of papers and review reports from five venues."
)


def marker_a(i: int) -> str:
    return f"mkA{i:02d}x"


def build_corpus_a(out_dir: Path) -> Path:
    """60 docs; the five designated Yes papers repeat the proposal's key
    tokens so the top-50 always contains them."""
    records = []
    for i in range(60):
        pid = f"pkA{i:02d}"
        mark = marker_a(i)
        if pid in A_YES_PAPERS:
            title = f"peer review corpus resource {mark}"
            abstract = (
                f"{mark} licensed datasets corpus of papers and review reports "
                "for peer review study with multi domain coverage"
            )
        else:
            title = f"reviewing study {mark}"
            abstract = f"{mark} assorted research on review processes number {i}"
        records.append(PaperRecord(paper_id=pid, title=title, abstract=abstract))
    path = out_dir / "corpus_a.jsonl"
    write_corpus_file(path, records)
    return path


def build_script_a() -> dict:
    fixtures = [
        {"template": "PX-relevance",
         "response": "Studies the peer review process, adjacent to the proposed corpus."},
        {"template": "P1",
         "response": "- the lack of clearly licensed datasets and multi-domain corpora for peer review study"},
        {"template": "P2", "response": f"- {A_QUESTION}"},
    ]
    for pid in A_YES_PAPERS:
        idx = int(pid[3:])
        fixtures.append({
            "template": "P3",
            "match_all": [marker_a(idx)],
            "response": f"Yes. Paragraph 1 shows {pid} releases a licensed multi-domain peer review corpus.",
        })
    fixtures.append({"template": "P3", "response": "No"})
    for pid, gaps in A_GAPS.items():
        idx = int(pid[3:])
        fixtures.append({
            "template": "P4",
            "match_all": [marker_a(idx)],
            "response": "\n".join(f"- {g}" for g in gaps),
        })
    fixtures.append({"template": "P5", "response": A_REWRITE})
    return {
        "fixtures": fixtures,
        "gates": [
            {"gate": "A", "edits": []},
            {"gate": "B", "edits": []},
            {"gate": "C", "edits": [{"op": "delete", "item_id": f"q0.1::{A_DELETED_AT_C}"}]},
            {"gate": "D", "edits": [
                {"op": "update", "item_id": "gap0.1", "fields": {"selected": True}},
                {"op": "update", "item_id": "gap0.8", "fields": {"selected": True}},
                {"op": "update", "item_id": "gap0.11", "fields": {"selected": True}},
            ]},
            {"gate": "E", "decision": "accept", "edited_abstract": A_FINAL_EDIT},
        ],
    }


# ---------------------------------------------------------------------------
# Replay B
# ---------------------------------------------------------------------------

B_PROPOSAL = {
    "title": "Reference free evaluation metric for retrieval augmented question answering",
    "abstract": (
        "questions with long answers on long documents have no unique reference "
        "evidences and answers so expert evaluation is expensive and existing "
        "reference based evaluation metrics are inadequate and no reference free "
        "metric exists for retrieval augmented question answering so we propose "
        "to define this metric"
    ),
}

B_QUESTION = (
    "Is the research paper proposing a reference-free evaluation metric designed "
    "for evaluating retrieval augmented question answering tasks?"
)

B_PROBLEM = (
    "To define a reference free evaluation metric for the retrieval augmented "
    "question answering task."
)

# six related problems, each with a dominant coined marker token
B_PROBLEM_MARKERS = ("prbB1q", "prbB2q", "prbB3q", "prbB4q", "prbB5q", "prbB6q")
B_SIMILAR = [
    f"{m} {m} {m} evaluating complex tasks without unique answers variant {i}"
    for i, m in enumerate(B_PROBLEM_MARKERS[:4], start=1)
]
B_SUBTASKS = [
    f"{m} {m} {m} scoring long answers drawn from long documents variant {i}"
    for i, m in enumerate(B_PROBLEM_MARKERS[4:], start=5)
]

# pairing: problems (1,2) share 6 docs, (3,4) share 6, (5,6) share 8 -> 40 unique
_B_PAIR_SHARES = {(0, 1): 6, (2, 3): 6, (4, 5): 8}


def _design_b_retrieval() -> tuple[list[dict], dict[int, list[str]]]:
    """Return (doc specs, problem index -> its 10 designed paper ids)."""
    docs: list[dict] = []
    per_problem: dict[int, list[str]] = {i: [] for i in range(6)}
    counter = 0

    def new_doc(tokens: list[str]) -> str:
        nonlocal counter
        pid = f"dpB{counter:02d}"
        docs.append({"paper_id": pid, "marker": f"docB{counter:02d}x", "tokens": tokens})
        counter += 1
        return pid

    for (i, j), shared in _B_PAIR_SHARES.items():
        pure = 10 - shared
        mi, mj = B_PROBLEM_MARKERS[i], B_PROBLEM_MARKERS[j]
        for _ in range(pure):
            per_problem[i].append(new_doc([mi] * 4))
        for _ in range(pure):
            per_problem[j].append(new_doc([mj] * 4))
        for _ in range(shared):
            pid = new_doc([mi] * 4 + [mj] * 4)
            per_problem[i].append(pid)
            per_problem[j].append(pid)
    assert counter == 40
    return docs, per_problem


B_DOCS, B_PER_PROBLEM = _design_b_retrieval()

# 17 Yes pairs: 3 per problem for problems 1..5, 2 for problem 6
_B_YES_COUNTS = (3, 3, 3, 3, 3, 2)
B_YES_PAIRS: list[tuple[int, str]] = []
for _i, _count in enumerate(_B_YES_COUNTS):
    for _pid in B_PER_PROBLEM[_i][:_count]:
        B_YES_PAIRS.append((_i, _pid))
assert len(B_YES_PAIRS) == 17

# researcher keeps 11 of the 17 at gate G
B_DESELECT = B_YES_PAIRS[11:]

B_METHODS = [
    "transformer based answer similarity scoring biased towards question semantics",
    "probabilistic informedness and markedness measures",
    "large language models as automated judges",
    "an open source library of summarization style metrics",
    "quantified reproducibility assessment grounded in metrology",
    "a robust benchmark for cross task evaluation",
    "a human in the loop leaderboard framework",
    "sparse attention with contrastive retriever learning",
    "a unified evaluation benchmark for long form answers",
    "fine tuning an evaluation model on human preference judgments",
]

B_FINAL_REWRITE = (
    "We propose a reference free evaluation metric for retrieval augmented "
    "question answering built on transformer based answer similarity scoring, "
    "informedness measures, and model based judges trained on human preference "
    "judgments, evaluated on a unified long form answer benchmark."
)


def build_corpus_b(out_dir: Path) -> Path:
    records = []
    for i in range(60):
        pid = f"skB{i:02d}"
        mark = f"seedB{i:02d}x"
        records.append(PaperRecord(
            paper_id=pid,
            title=f"question answering evaluation metric study {mark}",
            abstract=(
                f"{mark} reference based evaluation of question answering with "
                f"long answers and retrieval number {i}"
            ),
        ))
    for spec in B_DOCS:
        text = " ".join(spec["tokens"])
        records.append(PaperRecord(
            paper_id=spec["paper_id"],
            title=f"{text} {spec['marker']}",
            abstract=f"{spec['marker']} archive entry {text}",
        ))
    path = out_dir / "corpus_b.jsonl"
    write_corpus_file(path, records)
    return path


def _question_for(problem_index: int) -> str:
    marker = B_PROBLEM_MARKERS[problem_index]
    return (
        f"Is the research paper proposing an approach or method to solve "
        f"{marker} style evaluation?"
    )


def build_script_b(n_yes_override: int | None = None) -> dict:
    fixtures = [
        {"template": "PX-relevance", "response": "Evaluates question answering systems."},
        {"template": "P1",
         "response": "- no reference-free evaluation metric exists for retrieval augmented question answering"},
        {"template": "P2", "response": f"- {B_QUESTION}"},
        {"template": "P3", "response": "No"},
        {"template": "P6", "response": B_PROBLEM},
        {"template": "P7", "response": "\n".join(f"- {p}" for p in B_SIMILAR)},
        {"template": "P8", "response": "\n".join(f"- {p}" for p in B_SUBTASKS)},
    ]
    for i, marker in enumerate(B_PROBLEM_MARKERS):
        fixtures.append({
            "template": "P9",
            "match_all": [marker],
            "response": _question_for(i),
        })
    marker_of = {spec["paper_id"]: spec["marker"] for spec in B_DOCS}
    for problem_index, pid in B_YES_PAIRS:
        # shared docs carry two problems' markers in their chunks, so pair
        # fixtures key on the question's phrasing, which chunks never contain
        fixtures.append({
            "template": "P10",
            "match_all": [f"solve {B_PROBLEM_MARKERS[problem_index]} style", marker_of[pid]],
            "response": (
                f"Yes. The paper details an approach for "
                f"{B_PROBLEM_MARKERS[problem_index]} using resource {pid}."
            ),
        })
    fixtures.append({"template": "P10", "response": "No"})
    fixtures.append({"template": "P11", "response": "\n".join(f"- {t}" for t in B_METHODS)})
    fixtures.append({"template": "PX-method-rewrite", "response": B_FINAL_REWRITE})

    gate_g_edits = [
        {"op": "update", "item_id": f"ev.prob.{problem_index + 1}.{pid}",
         "fields": {"accepted": False}}
        for problem_index, pid in B_DESELECT
    ]
    return {
        "fixtures": fixtures,
        "method_synthesis": True,
        "gates": [
            {"gate": "A", "edits": []},
            {"gate": "B", "edits": []},
            {"gate": "F", "edits": []},
            {"gate": "G", "edits": gate_g_edits},
            {"gate": "H", "edits": []},
            {"gate": "I", "decision": "accept"},
        ],
    }


def write_fixture_files(out_dir: Path) -> dict:
    """Materialize both replays' corpora, proposals, and scripts."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus_a": build_corpus_a(out_dir),
        "corpus_b": build_corpus_b(out_dir),
        "proposal_a": out_dir / "proposal_a.json",
        "proposal_b": out_dir / "proposal_b.json",
        "script_a": out_dir / "script_a.json",
        "script_b": out_dir / "script_b.json",
    }
    paths["proposal_a"].write_text(json.dumps(A_PROPOSAL, indent=2) + "\n", encoding="utf-8")
    paths["proposal_b"].write_text(json.dumps(B_PROPOSAL, indent=2) + "\n", encoding="utf-8")
    paths["script_a"].write_text(json.dumps(build_script_a(), indent=2) + "\n", encoding="utf-8")
    paths["script_b"].write_text(json.dumps(build_script_b(), indent=2) + "\n", encoding="utf-8")
    return paths
