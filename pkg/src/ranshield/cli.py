"""Command line surface: corpus ingestion, scenario runs, evaluation, serving.

State that must survive across invocations (pending approvals, parked
incidents, ingested traces, the persisted index) lives in a state directory,
default ``./.ranshield``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import evalkit, kb
from .agent import ScriptedProvider
from .errors import RanShieldError
from .pipeline import Orchestrator
from .ran import RANSimulator
from .state import StateStore
from .telemetry import TelemetryStore

DEFAULT_STATE_DIR = ".ranshield"


def _state(ctx) -> StateStore:
    return StateStore(ctx.obj["state_dir"])


@click.group()
@click.option("--state-dir", default=DEFAULT_STATE_DIR, show_default=True,
              help="Directory for cross-invocation state.")
@click.pass_context
def main(ctx, state_dir):
    """Closed-loop RAN threat mitigation toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["state_dir"] = state_dir


# -- kb -------------------------------------------------------------------

@main.group(name="kb")
def kb_group():
    """Knowledge-base commands."""


@kb_group.command("ingest")
@click.argument("corpus_path")
@click.pass_context
def kb_ingest(ctx, corpus_path):
    """Load a corpus snapshot, build the index, persist it."""
    try:
        corpus = kb.load_corpus(corpus_path)
        index = kb.build_index(corpus)
    except RanShieldError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    _state(ctx).save_index(index)
    click.echo(f"ingested {len(corpus)} techniques (corpus {corpus.version}); "
               f"index dimension {index.dimension}")


# -- traces ---------------------------------------------------------------

@main.group()
def trace():
    """Telemetry trace commands."""


@trace.command("ingest")
@click.argument("trace_id")
@click.argument("trace_file")
@click.pass_context
def trace_ingest(ctx, trace_id, trace_file):
    """Validate and register a JSONL trace under TRACE_ID."""
    store = TelemetryStore()
    try:
        with open(trace_file, encoding="utf-8") as fh:
            summary = store.ingest_trace(trace_id, fh)
    except (OSError, RanShieldError) as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    _state(ctx).record_trace(trace_id, trace_file)
    click.echo(f"trace {trace_id}: {summary.count} records "
               f"({summary.rejected_count} rejected), "
               f"ts [{summary.first_ts}, {summary.last_ts}]")


# -- scenarios ------------------------------------------------------------

@main.group()
def scenario():
    """Scenario fixture commands."""


@scenario.command("run")
@click.argument("scenario_id")
@click.option("--runs", default=1, show_default=True)
@click.option("--provider", "provider_kind", default="scripted",
              type=click.Choice(["scripted", "remote"]), show_default=True)
@click.pass_context
def scenario_run(ctx, scenario_id, runs, provider_kind):
    """Run one scenario; pauses at the approval gate if one is reached."""
    if provider_kind == "remote":
        raise click.ClickException(
            "remote provider requires a service config; use `serve` or scripted runs"
        )
    try:
        scenarios = evalkit.load_scenarios(only=[scenario_id])
    except RanShieldError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    sc = scenarios[0]
    corpus, index = evalkit.load_default_kb()
    store_state = _state(ctx)

    for run_idx in range(1, runs + 1):
        store = TelemetryStore()
        with open(sc.trace_path, encoding="utf-8") as fh:
            store.ingest_trace(sc.scenario_id, fh)
        sim = RANSimulator()
        orch = Orchestrator(store, corpus, index, sim,
                            ScriptedProvider.from_file(sc.script_path))
        ev = sc.event
        event = store.add_event(
            source=ev["source"], description=ev["description"],
            severity_hint=ev.get("severity_hint"),
            telemetry_ref=ev.get("telemetry_ref"),
            affected_ue_ids=ev.get("affected_ue_ids"),
        )
        inc = orch.handle_incident(event, scenario_id=sc.scenario_id)
        click.echo(f"run {run_idx}: incident {inc.incident_id} phase={inc.phase}")
        if inc.phase == "awaiting_approval":
            store_state.save(sim, [inc.to_dict()])
            click.echo(f"pending approval: {inc.approval_id} "
                       f"(decide with `ranshield approvals decide {inc.approval_id} approve`)")


# -- evaluation -----------------------------------------------------------

@main.command("eval")
@click.option("--runs", default=evalkit.DEFAULT_RUNS, show_default=True)
@click.option("--provider", "provider_kind", default="scripted",
              type=click.Choice(["scripted", "remote"]), show_default=True)
@click.option("--results-dir", default="results", show_default=True)
def eval_cmd(runs, provider_kind, results_dir):
    """Run the full scenario suite and write metrics reports."""
    if provider_kind == "remote":
        raise click.ClickException("remote provider evaluation is configuration-dependent; "
                                   "this build ships the scripted suite")
    try:
        corpus, index = evalkit.load_default_kb()
        scenarios = evalkit.load_scenarios()
        records = evalkit.run_suite(scenarios, corpus, index, runs_per_scenario=runs)
    except RanShieldError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    from .tools import build_registry  # catalog names need a bound registry
    registry = build_registry(TelemetryStore(), corpus, index, RANSimulator())
    report = evalkit.compute_metrics(records, scenarios,
                                     catalog_tools=set(registry.names()))
    out = Path(results_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(evalkit.emit_report(report, "json") + "\n", "utf-8")
    (out / "metrics.txt").write_text(evalkit.emit_report(report, "table") + "\n", "utf-8")
    (out / "records.json").write_text(
        json.dumps([r.to_dict() for r in records], indent=1) + "\n", "utf-8"
    )
    click.echo(evalkit.emit_report(report, "table"))
    click.echo(f"reports written to {out}/")


# -- approvals ------------------------------------------------------------

@main.group()
def approvals():
    """Approval queue commands (headless fallback for the console)."""


@approvals.command("list")
@click.pass_context
def approvals_list(ctx):
    sim, _ = _state(ctx).load()
    pending = sim.list_approvals(status="pending")
    if not pending:
        click.echo("no pending approvals")
        return
    for req in pending:
        click.echo(f"{req.approval_id}  incident={req.incident_id}  "
                   f"base_version={req.diff.base_version}")
        for line in req.rendered_summary.splitlines():
            click.echo(f"    {line}")


@approvals.command("decide")
@click.argument("approval_id")
@click.argument("decision", type=click.Choice(["approve", "reject"]))
@click.option("--operator", default="cli-operator", show_default=True)
@click.pass_context
def approvals_decide(ctx, approval_id, decision, operator):
    mapped = "approved" if decision == "approve" else "rejected"
    try:
        outcome = _state(ctx).apply_decision(approval_id, mapped, operator)
    except RanShieldError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    msg = f"approval {approval_id}: {mapped}"
    if "terminal_phase" in outcome:
        msg += f"; incident {outcome['incident_id']} -> {outcome['terminal_phase']}"
    click.echo(msg)


# -- service --------------------------------------------------------------

@main.command("serve")
@click.option("--config", "config_path", required=True)
def serve_cmd(config_path):
    """Start the HTTP service from a JSON config file."""
    try:
        config = json.loads(Path(config_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"cannot load config {config_path}: {exc}", err=True)
        sys.exit(1)
    from .service import run_service
    run_service(config)


if __name__ == "__main__":
    main()
