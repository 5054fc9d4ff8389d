"""Event-sourced session persistence.

One append-only JSON-lines file per session plus a small index file. Events
carry monotone ids and non-decreasing UTC timestamps; lines are written in
canonical key order so replay comparisons can be bit-exact. The log is the
source of truth; every snapshot anywhere else is a rebuildable cache.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterator

from ideagate.errors import NotFound, SessionClosed

ACTORS = ("researcher", "colleague", "mentor", "system")
EVENT_KINDS = ("state-transition", "llm-call", "llm-response", "gate-open", "gate-edit", "error")


def canonical_json(obj) -> str:
    """The one serialization used for durable lines and bit-equality checks."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class LogEvent:
    event_id: int
    timestamp: str
    actor: str
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "timestamp": self.timestamp,
            "actor": self.actor,
            "kind": self.kind,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogEvent":
        return cls(
            event_id=int(d["event_id"]),
            timestamp=str(d["timestamp"]),
            actor=str(d["actor"]),
            kind=str(d["kind"]),
            payload=dict(d["payload"]),
        )


@dataclass
class SessionRecord:
    session_id: str
    creator: str
    created_at: str
    config: dict
    closed: bool = False
    last_event_id: int = 0
    state: str | None = None  # cache of the latest transition target

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "creator": self.creator,
            "created_at": self.created_at,
            "config": self.config,
            "closed": self.closed,
            "last_event_id": self.last_event_id,
            "state": self.state,
        }


@dataclass
class ReplayDiagnostics:
    events_applied: int = 0
    halted: bool = False
    problems: list[str] = field(default_factory=list)


class SessionStore:
    """Single-writer-per-session append log with concurrent readers."""

    def __init__(self, root: str | Path, durable: bool = True, clock: Callable[[], str] = utc_now_iso):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.durable = durable
        self._clock = clock
        self._locks: dict[str, threading.Lock] = {}
        self._records: dict[str, SessionRecord] = {}
        self._last_ts: dict[str, str] = {}
        self._registry_lock = threading.Lock()

    def _log_path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.jsonl"

    def _index_path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.index.json"

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create_session(self, session_id: str, creator: str = "researcher", config: dict | None = None) -> SessionRecord:
        with self._lock_for(session_id):
            if session_id in self._records or self._log_path(session_id).exists():
                raise SessionClosed(f"session {session_id!r} already exists")
            record = SessionRecord(
                session_id=session_id,
                creator=creator,
                created_at=self._clock(),
                config=config or {},
            )
            self._records[session_id] = record
            self._log_path(session_id).touch()
            self._write_index(record)
            return record

    def _write_index(self, record: SessionRecord) -> None:
        self._index_path(record.session_id).write_text(
            canonical_json(record.to_dict()) + "\n", encoding="utf-8"
        )

    def get_record(self, session_id: str) -> SessionRecord:
        record = self._records.get(session_id)
        if record is None:
            path = self._index_path(session_id)
            if not path.exists():
                raise NotFound(f"no session {session_id!r}")
            data = json.loads(path.read_text(encoding="utf-8"))
            record = SessionRecord(
                session_id=data["session_id"],
                creator=data["creator"],
                created_at=data["created_at"],
                config=data["config"],
                closed=data["closed"],
                last_event_id=data["last_event_id"],
                state=data.get("state"),
            )
            self._records[session_id] = record
        return record

    def list_sessions(self) -> list[str]:
        on_disk = {p.stem for p in self.root.glob("*.jsonl")}
        return sorted(on_disk | set(self._records))

    def append_event(self, session_id: str, actor: str, kind: str, payload: dict) -> LogEvent:
        """Assign id and timestamp, write, and make durable before returning."""
        if actor not in ACTORS:
            raise ValueError(f"unknown actor {actor!r}")
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        with self._lock_for(session_id):
            record = self.get_record(session_id)
            if record.closed:
                raise SessionClosed(f"session {session_id!r} is closed")
            ts = self._clock()
            last = self._last_ts.get(session_id, record.created_at)
            if ts < last:
                ts = last
            event = LogEvent(
                event_id=record.last_event_id + 1,
                timestamp=ts,
                actor=actor,
                kind=kind,
                payload=payload,
            )
            line = canonical_json(event.to_dict()) + "\n"
            with open(self._log_path(session_id), "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                if self.durable:
                    os.fsync(fh.fileno())
            record.last_event_id = event.event_id
            if kind == "state-transition":
                record.state = event.payload.get("to")
            self._last_ts[session_id] = ts
            self._write_index(record)
            return event

    def close_session(self, session_id: str) -> None:
        with self._lock_for(session_id):
            record = self.get_record(session_id)
            record.closed = True
            self._write_index(record)

    def read_events(self, session_id: str) -> Iterator[LogEvent]:
        """Yield the consistent prefix of a session's log (strict decode)."""
        for event, _ in self.read_events_checked(session_id):
            yield event

    def read_events_checked(self, session_id: str) -> Iterator[tuple[LogEvent, int]]:
        path = self._log_path(session_id)
        if not path.exists():
            raise NotFound(f"no log for session {session_id!r}")
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                data = json.loads(line)
                yield LogEvent.from_dict(data), line_no


def read_log_file(path: str | Path) -> tuple[list[LogEvent], ReplayDiagnostics]:
    """Read any session log file, halting at the first corrupt entry."""
    events: list[LogEvent] = []
    diag = ReplayDiagnostics()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                event = LogEvent.from_dict(data)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                diag.halted = True
                diag.problems.append(f"line {line_no}: undecodable event ({exc})")
                break
            if events and event.event_id != events[-1].event_id + 1:
                diag.halted = True
                diag.problems.append(
                    f"line {line_no}: event_id {event.event_id} breaks monotone sequence"
                )
                break
            events.append(event)
    diag.events_applied = len(events)
    return events, diag
