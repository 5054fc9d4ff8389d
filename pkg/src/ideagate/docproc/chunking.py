"""Token-budgeted paragraph splitting.

The tokenizer is pluggable: it breaks a paragraph into atoms (whitespace
words by default) and prices each atom in tokens. The splitter fills pieces
greedily left to right; joining the pieces' atom sequences with single spaces
reconstructs the paragraph's atom sequence exactly, which is the round-trip
contract everything downstream relies on. An atom whose own price exceeds
the budget is emitted alone and flagged, never dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable


@dataclass(frozen=True)
class Tokenizer:
    name: str
    split: Callable[[str], list[str]]
    cost: Callable[[str], int]


WHITESPACE = Tokenizer("whitespace", split=str.split, cost=lambda atom: 1)


def approx_subword(chars_per_token: int = 4) -> Tokenizer:
    """Whitespace atoms priced at ~1 token per `chars_per_token` characters.

    Stand-in for an LLM tokenizer when one is configured without a local
    implementation; long words can exceed the budget and trip the oversize
    flag, exercising the same path a real subword tokenizer would.
    """
    return Tokenizer(
        f"approx-subword-{chars_per_token}",
        split=str.split,
        cost=lambda atom: max(1, math.ceil(len(atom) / chars_per_token)),
    )


@dataclass(frozen=True)
class SplitPiece:
    text: str
    token_count: int
    oversize: bool = False


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    paper_id: str
    paragraph_index: int
    split_index: int
    text: str
    token_count: int
    oversize: bool = False

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "paper_id": self.paper_id,
            "paragraph_index": self.paragraph_index,
            "split_index": self.split_index,
            "text": self.text,
            "token_count": self.token_count,
            "oversize": self.oversize,
        }


def split_to_fit(
    paragraph: str, max_tokens: int, tokenizer: Tokenizer = WHITESPACE
) -> list[SplitPiece]:
    """Greedy left-to-right split of one paragraph to the token budget."""
    if max_tokens < 1:
        raise ValueError("max_tokens must be >= 1")
    atoms = tokenizer.split(paragraph)
    pieces: list[SplitPiece] = []
    current: list[str] = []
    current_cost = 0

    def flush():
        nonlocal current, current_cost
        if current:
            pieces.append(SplitPiece(" ".join(current), current_cost))
            current, current_cost = [], 0

    for atom in atoms:
        cost = tokenizer.cost(atom)
        if cost > max_tokens:
            flush()
            pieces.append(SplitPiece(atom, cost, oversize=True))
            continue
        if current_cost + cost > max_tokens:
            flush()
        current.append(atom)
        current_cost += cost
    flush()
    return pieces


def chunk_document(
    paper_id: str,
    paragraphs: tuple[str, ...] | list[str],
    max_tokens: int,
    tokenizer: Tokenizer = WHITESPACE,
) -> list[Chunk]:
    """Chunk every paragraph; ids are paper:paragraph:split."""
    chunks: list[Chunk] = []
    for p_idx, paragraph in enumerate(paragraphs):
        for s_idx, piece in enumerate(split_to_fit(paragraph, max_tokens, tokenizer)):
            chunks.append(
                Chunk(
                    chunk_id=f"{paper_id}:{p_idx}:{s_idx}",
                    paper_id=paper_id,
                    paragraph_index=p_idx,
                    split_index=s_idx,
                    text=piece.text,
                    token_count=piece.token_count,
                    oversize=piece.oversize,
                )
            )
    return chunks
