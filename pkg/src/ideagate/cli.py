"""Command-line interface: serve, ingest, run, replay, export, report."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ideagate.errors import ConfigError, IdeagateError
from ideagate.service.config import ServiceConfig
from ideagate.session.store import canonical_json, read_log_file


def _load_config(config_path: str | None, corpus: str | None = None, **overrides) -> ServiceConfig:
    cfg = ServiceConfig.load(config_path)
    if corpus:
        cfg.corpus_path = corpus
    engine_overrides = {k: v for k, v in overrides.items() if v is not None}
    if engine_overrides:
        from dataclasses import replace

        cfg.engine = replace(cfg.engine, **engine_overrides)
    return cfg


@click.group()
def main():
    """Research ideation workflows with researcher gates."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")
@click.option("--corpus", type=click.Path(exists=True), default=None, help="Corpus JSONL file.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(config_path, corpus, host, port):
    """Run the HTTP service."""
    from ideagate.service.app import serve as _serve

    try:
        cfg = _load_config(config_path, corpus)
        if host:
            cfg.host = host
        if port:
            cfg.port = port
        _serve(cfg)
    except ConfigError as exc:
        for problem in exc.problems:
            click.echo(f"config error: {problem}", err=True)
        sys.exit(2)


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--corpus", type=click.Path(exists=True), required=True)
def ingest(config_path, corpus):
    """Embed and index a corpus file; print the ingest report."""
    from ideagate.service.headless import build_corpus, build_embedder

    try:
        cfg = _load_config(config_path)
        embedder = build_embedder(cfg)
        index, report, _ = build_corpus(cfg, embedder, corpus)
    except ConfigError as exc:
        for problem in exc.problems:
            click.echo(f"config error: {problem}", err=True)
        sys.exit(2)
    click.echo(f"ingested {report.count} records, skipped {report.skipped}")
    for reason in report.reasons:
        click.echo(f"  skipped: {reason}")
    click.echo(f"corpus size: {len(index)}")


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--corpus", type=click.Path(exists=True), default=None)
@click.option("--proposal", "proposal_path", type=click.Path(exists=True), required=True,
              help="JSON file with title and abstract.")
@click.option("--script", "script_path", type=click.Path(exists=True), required=True,
              help="JSON run script: provider fixtures plus gate decisions.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--k-papers", type=int, default=None)
@click.option("--k-per-problem", type=int, default=None)
@click.option("--k-small", type=int, default=None)
@click.option("--max-tokens", type=int, default=None)
@click.option("--loop-cap", type=int, default=None)
def run(config_path, corpus, proposal_path, script_path, out_dir,
        k_papers, k_per_problem, k_small, max_tokens, loop_cap):
    """Execute a full scripted workflow non-interactively."""
    from ideagate.service.headless import run_headless

    try:
        cfg = _load_config(
            config_path,
            corpus,
            k_papers=k_papers,
            k_per_problem=k_per_problem,
            k_small=k_small,
            max_tokens=max_tokens,
            loop_cap=loop_cap,
        )
    except ConfigError as exc:
        for problem in exc.problems:
            click.echo(f"config error: {problem}", err=True)
        sys.exit(2)
    code = run_headless(proposal_path, script_path, out_dir, cfg, corpus)
    if code == 0:
        click.echo(f"run complete; artifacts in {out_dir}")
    sys.exit(code)


@main.command()
@click.option("--log", "log_path", type=click.Path(exists=True), required=True,
              help="Session log (JSON-lines).")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the reconstructed snapshot here.")
def replay(log_path, out_path):
    """Reconstruct session state from a log and print the final state."""
    from ideagate.errors import GateRejected, TransitionError
    from ideagate.workflow import reducer

    events, diag = read_log_file(log_path)
    session_id = Path(log_path).stem
    try:
        state = reducer.replay(session_id, events)
    except (TransitionError, GateRejected) as exc:
        click.echo(f"replay rejected: {exc}", err=True)
        sys.exit(3)
    for problem in diag.problems:
        click.echo(f"log problem: {problem}", err=True)
    snapshot = canonical_json(state.to_dict())
    if out_path:
        Path(out_path).write_text(snapshot + "\n", encoding="utf-8")
    click.echo(f"events applied: {diag.events_applied}")
    click.echo(f"final state: {state.state}")
    if diag.halted:
        click.echo("replay halted at last valid event", err=True)
        sys.exit(4)


@main.command()
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--task", type=click.Choice(
    ["motivation-retrieval", "proposal-rewrite", "problem-retrieval", "method-synthesis"]),
    required=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Output JSONL (default stdout).")
def export(log_path, task, out_path):
    """Export user-validated (input, agent output, validated output) triples."""
    from ideagate.session.export import export_dataset

    events, diag = read_log_file(log_path)
    for problem in diag.problems:
        click.echo(f"log problem: {problem}", err=True)
    session_id = Path(log_path).stem
    try:
        records, notice = export_dataset(session_id, events, task)
    except IdeagateError as exc:
        click.echo(f"export failed: {exc}", err=True)
        sys.exit(2)
    lines = "".join(canonical_json(r) + "\n" for r in records)
    if out_path:
        Path(out_path).write_text(lines, encoding="utf-8")
        click.echo(f"wrote {len(records)} records to {out_path}")
    else:
        click.echo(lines, nl=False)
    if notice:
        click.echo(f"notice: {notice}", err=True)


@main.command()
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def report(log_path, out_dir):
    """Render a session log to CSV tables and PNG figures."""
    from ideagate.report import render_report

    manifest = render_report(log_path, out_dir)
    click.echo(f"events: {manifest['events']}, verdicts: {manifest['verdicts']}, "
               f"final state: {manifest['final_state']}")
    for path in manifest["files"]:
        click.echo(f"  wrote {path}")


if __name__ == "__main__":
    main()
