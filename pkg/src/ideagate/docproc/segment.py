"""Paper-body parsing: paragraphs as semantic segments.

Plain text is the contract: blank-line boundaries, trimmed blocks, empties
dropped. PDF bytes are handled best-effort by converting to plain text first
(pypdf when importable) and inheriting the same rule; anything undecodable is
a ParseError carrying the paper id.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ideagate.errors import ParseError

_BLANK_LINE = re.compile(r"\n[ \t\r]*\n")


@dataclass(frozen=True)
class DocumentText:
    paper_id: str
    paragraphs: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.paragraphs)


def _pdf_to_text(data: bytes, paper_id: str) -> str:
    try:
        from io import BytesIO

        from pypdf import PdfReader
    except ImportError:
        raise ParseError(paper_id, "PDF input but no PDF backend available") from None
    try:
        reader = PdfReader(BytesIO(data))
        return "\n\n".join(page.extract_text() or "" for page in reader.pages)
    except Exception as exc:
        raise ParseError(paper_id, f"PDF extraction failed: {exc}") from exc


def segment_paragraphs(source: str | bytes, paper_id: str) -> DocumentText:
    """Split a paper body into ordered, non-empty paragraphs."""
    if isinstance(source, bytes):
        if source.lstrip()[:5] == b"%PDF-":
            text = _pdf_to_text(source, paper_id)
        else:
            try:
                text = source.decode("utf-8-sig")
            except UnicodeDecodeError as exc:
                raise ParseError(paper_id, f"not valid UTF-8: {exc}") from exc
    else:
        text = source
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    blocks = (b.strip() for b in _BLANK_LINE.split(text))
    return DocumentText(paper_id=paper_id, paragraphs=tuple(b for b in blocks if b))
