#!/usr/bin/env python3
"""Walkthrough: one scripted incident end to end.

Runs the Null-Cipher scenario through all three stages (analysis,
classification, response planning), pauses at the human-approval gate,
approves the proposed config change, and shows the resulting config
mutation, reboot, and audit trail.
"""

from ranshield.agent import ScriptedProvider
from ranshield.evalkit import FIXTURES_DIR, load_default_kb, load_scenarios
from ranshield.pipeline import Orchestrator
from ranshield.ran import RANSimulator
from ranshield.telemetry import TelemetryStore


def main():
    corpus, index = load_default_kb()
    scenario = load_scenarios(only=["Null-Cipher-Integrity"])[0]

    store = TelemetryStore()
    with open(scenario.trace_path, encoding="utf-8") as fh:
        summary = store.ingest_trace(scenario.scenario_id, fh)
    print(f"ingested trace: {summary.count} records")

    sim = RANSimulator()
    orch = Orchestrator(store, corpus, index, sim,
                        ScriptedProvider.from_file(scenario.script_path))

    ev = scenario.event
    event = store.add_event(source=ev["source"], description=ev["description"],
                            severity_hint=ev.get("severity_hint"),
                            telemetry_ref=ev.get("telemetry_ref"),
                            affected_ue_ids=ev.get("affected_ue_ids"))
    inc = orch.handle_incident(event, scenario_id=scenario.scenario_id)

    print(f"\nincident {inc.incident_id}")
    print(f"  verdict:    {inc.report.verdict} ({inc.report.risk} risk)")
    print(f"  technique:  {', '.join(inc.classification.selected_technique_ids)}")
    print(f"  plan steps: {[s.tool_name for s in inc.plan.steps]}")
    print(f"  phase:      {inc.phase}")

    req = sim.list_approvals(status="pending")[0]
    print(f"\npending approval {req.approval_id}:")
    for line in req.rendered_summary.splitlines():
        print(f"  {line}")

    orch.decide_approval(req.approval_id, "approved", "demo-operator")
    inc = orch.resume_after_decision(inc.incident_id)
    print(f"\nafter approval: phase={inc.phase}")

    cfg = sim.get_ran_cu_config()
    state = sim.get_state()
    print(f"config v{cfg.version}: ciphering={cfg.ciphering_algorithms} "
          f"integrity={cfg.integrity_algorithms}")
    print(f"boot_count={state.boot_count}, ue_contexts={len(state.ue_contexts)}")

    print("\naudit trail:")
    for entry in sim.get_audit_log():
        print(f"  {entry['kind']:<10} approval={entry.get('approval_id')}")


if __name__ == "__main__":
    main()
