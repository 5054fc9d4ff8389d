"""Paper records and the JSON-lines corpus file format.

One record per line, UTF-8: ``{"paper_id": ..., "title": ..., "abstract":
..., "full_text_uri"?: ..., "year"?: ..., "venue"?: ...}``. Malformed lines
are reported, never fatal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    title: str
    abstract: str = ""
    full_text_uri: str | None = None
    year: str | None = None
    venue: str | None = None

    def validate(self) -> str | None:
        """Return a problem description, or None when the record is sound."""
        if not isinstance(self.paper_id, str) or not self.paper_id:
            return "missing or empty paper_id"
        if not isinstance(self.title, str) or not self.title.strip():
            return "missing or empty title"
        if not isinstance(self.abstract, str):
            return "abstract is not text"
        return None

    def to_dict(self) -> dict:
        d = {"paper_id": self.paper_id, "title": self.title, "abstract": self.abstract}
        for key in ("full_text_uri", "year", "venue"):
            value = getattr(self, key)
            if value is not None:
                d[key] = value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PaperRecord":
        return cls(
            paper_id=str(d.get("paper_id", "")),
            title=str(d.get("title", "")),
            abstract=str(d.get("abstract", "") or ""),
            full_text_uri=d.get("full_text_uri"),
            year=str(d["year"]) if d.get("year") is not None else None,
            venue=str(d["venue"]) if d.get("venue") is not None else None,
        )


@dataclass
class CorpusReadReport:
    records: list[PaperRecord] = field(default_factory=list)
    problems: list[str] = field(default_factory=list)


def read_corpus_file(path: str | Path) -> CorpusReadReport:
    """Read a JSONL corpus file; undecodable lines land in problems."""
    report = CorpusReadReport()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                report.problems.append(f"line {line_no}: invalid JSON ({exc.msg})")
                continue
            if not isinstance(data, dict):
                report.problems.append(f"line {line_no}: not a JSON object")
                continue
            report.records.append(PaperRecord.from_dict(data))
    return report


def write_corpus_file(path: str | Path, records: Iterable[PaperRecord]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")
            n += 1
    return n


def resolve_full_text(record: PaperRecord, corpus_dir: str | Path | None) -> str | None:
    """Load the paper body named by full_text_uri, if any.

    Relative URIs resolve against the corpus file's directory. Returns None
    when the record names no body or the file is missing; the caller falls
    back to a title+abstract pseudo-body.
    """
    if not record.full_text_uri:
        return None
    p = Path(record.full_text_uri)
    if not p.is_absolute() and corpus_dir is not None:
        p = Path(corpus_dir) / p
    try:
        return p.read_text(encoding="utf-8")
    except OSError:
        return None


def iter_pseudo_body(record: PaperRecord) -> str:
    """Two-paragraph stand-in body for records without full text."""
    if record.abstract.strip():
        return f"{record.title}\n\n{record.abstract}"
    return record.title
