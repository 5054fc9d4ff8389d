"""Session report: delimited summaries plus rendered figures.

Reads a session log file and writes, into the output directory:
  events.csv    one row per log event
  verdicts.csv  one row per validation verdict (all passes)
  figures/verdict_counts.png   verdict distribution bar chart
  figures/event_timeline.png   cumulative events by kind over the log
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ideagate.session.store import LogEvent, read_log_file
from ideagate.workflow import reducer
from ideagate.workflow.model import SessionState

_VERDICT_ORDER = ("Yes", "No", "Unanswerable")


def _collect_verdicts(events: list[LogEvent]) -> list[dict]:
    rows: list[dict] = []
    for event in events:
        if event.kind != "state-transition":
            continue
        for v in event.payload.get("verdicts", []):
            rows.append({
                "verdict_id": v.get("verdict_id", ""),
                "question_id": v.get("question_id", ""),
                "paper_id": v.get("paper_id", ""),
                "verdict": v.get("verdict", ""),
                "error": v.get("error") or "",
            })
    return rows


def render_report(log_path: str | Path, out_dir: str | Path) -> dict:
    """Write CSV tables and PNG figures; returns a small manifest."""
    out = Path(out_dir)
    figures = out / "figures"
    figures.mkdir(parents=True, exist_ok=True)
    events, diag = read_log_file(log_path)
    session_id = Path(log_path).stem
    state: SessionState = reducer.replay(session_id, events)

    with open(out / "events.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["event_id", "timestamp", "actor", "kind", "to_state", "template_id"])
        for e in events:
            writer.writerow([
                e.event_id,
                e.timestamp,
                e.actor,
                e.kind,
                e.payload.get("to", ""),
                e.payload.get("template_id", ""),
            ])

    verdict_rows = _collect_verdicts(events)
    with open(out / "verdicts.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["verdict_id", "question_id", "paper_id", "verdict", "error"]
        )
        writer.writeheader()
        writer.writerows(verdict_rows)

    counts = {v: 0 for v in _VERDICT_ORDER}
    for row in verdict_rows:
        if row["verdict"] in counts:
            counts[row["verdict"]] += 1
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.bar(list(counts), list(counts.values()), color=["#2a9d8f", "#e76f51", "#8d99ae"])
    ax.set_ylabel("pairs")
    ax.set_title(f"Validation verdicts ({session_id})")
    fig.tight_layout()
    fig.savefig(figures / "verdict_counts.png", dpi=150)
    plt.close(fig)

    kinds = sorted({e.kind for e in events})
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    for kind in kinds:
        xs, ys, total = [], [], 0
        for e in events:
            if e.kind == kind:
                total += 1
            xs.append(e.event_id)
            ys.append(total)
        ax.plot(xs, ys, label=kind, linewidth=1.4)
    ax.set_xlabel("event id")
    ax.set_ylabel("cumulative")
    ax.set_title("Event timeline")
    ax.legend(fontsize=7, loc="upper left")
    fig.tight_layout()
    fig.savefig(figures / "event_timeline.png", dpi=150)
    plt.close(fig)

    return {
        "events": len(events),
        "verdicts": len(verdict_rows),
        "final_state": state.state,
        "halted": diag.halted,
        "files": [
            str(out / "events.csv"),
            str(out / "verdicts.csv"),
            str(figures / "verdict_counts.png"),
            str(figures / "event_timeline.png"),
        ],
    }
