"""Tool catalog construction: binds store/kb/control instances to ToolSpecs.

Three read-only tool families back the reasoning loops (network data, MITRE
lookups, control-plane reads). The two mutating control tools exist only in
the plan catalog: they carry no loop roles, so the whitelist guardrail keeps
any reasoning loop from executing them directly; the config tuning workflow
is the only executor.
"""

from __future__ import annotations

from .agent import ToolParam, ToolRegistry, ToolSpec
from .kb import Corpus, VectorIndex
from .ran import RANSimulator
from .telemetry import TelemetryStore

ANALYSIS_ROLE = "analysis"
CLASSIFICATION_ROLE = "classification"
RESPONSE_ROLE = "response"

# Step-ordering constraints for plan validation: key must appear after value.
PLAN_ORDERING = {
    "update_ran_cu_config": ["get_ran_cu_config"],
    "reboot_ran": ["update_ran_cu_config"],
}


def build_registry(store: TelemetryStore, corpus: Corpus, index: VectorIndex,
                   sim: RANSimulator) -> ToolRegistry:
    reg = ToolRegistry()

    # Network Data APIs (analysis agent)
    reg.register(ToolSpec(
        name="get_traffic",
        description="Fetch telemetry records from an ingested trace window",
        params=(
            ToolParam("trace_id", "string"),
            ToolParam("ts_from", "int"),
            ToolParam("ts_to", "int"),
            ToolParam("layer", "string", required=False),
            ToolParam("direction", "string", required=False),
            ToolParam("ue_id", "string", required=False),
        ),
        mutating=False,
        allowed_agents=frozenset({ANALYSIS_ROLE}),
        handler=lambda p: [
            r.to_dict()
            for r in store.get_traffic(
                p["trace_id"], p["ts_from"], p["ts_to"],
                layer=p.get("layer"), direction=p.get("direction"),
                ue_id=p.get("ue_id"),
            )
        ],
    ))
    reg.register(ToolSpec(
        name="get_network_events",
        description="List detector events received since a timestamp",
        params=(ToolParam("since", "int", required=False),),
        mutating=False,
        allowed_agents=frozenset({ANALYSIS_ROLE}),
        handler=lambda p: [e.to_dict() for e in store.get_network_events(p.get("since", 0))],
    ))
    reg.register(ToolSpec(
        name="get_ue_description",
        description="Current RRC and security-context state of one UE",
        params=(ToolParam("ue_id", "string"),),
        mutating=False,
        allowed_agents=frozenset({ANALYSIS_ROLE, RESPONSE_ROLE}),
        handler=lambda p: store.get_ue_description(p["ue_id"]).to_dict(),
    ))

    # MITRE APIs (classification agent)
    reg.register(ToolSpec(
        name="search_fight",
        description="Semantic Top-K search over the FiGHT technique corpus",
        params=(ToolParam("query", "string"), ToolParam("k", "int", required=False)),
        mutating=False,
        allowed_agents=frozenset({CLASSIFICATION_ROLE}),
        handler=lambda p: [
            {"technique_id": r.technique_id, "score": r.score, "rank": r.rank}
            for r in index.search(p["query"], p.get("k", 3))
        ],
    ))
    reg.register(ToolSpec(
        name="get_technique",
        description="Exact-ID lookup of a FiGHT technique",
        params=(ToolParam("technique_id", "string"),),
        mutating=False,
        allowed_agents=frozenset({CLASSIFICATION_ROLE, RESPONSE_ROLE}),
        handler=lambda p: _technique_dict(corpus, p["technique_id"]),
    ))
    reg.register(ToolSpec(
        name="get_mitigations",
        description="Mitigations attached to a FiGHT technique, corpus order",
        params=(ToolParam("technique_id", "string"),),
        mutating=False,
        allowed_agents=frozenset({CLASSIFICATION_ROLE, RESPONSE_ROLE}),
        handler=lambda p: [
            {"mitigation_id": m.mitigation_id, "name": m.name, "guidance": m.guidance}
            for m in corpus.get_mitigations(p["technique_id"])
        ],
    ))

    # Control APIs: the read is loop-callable; the writers are plan-only.
    reg.register(ToolSpec(
        name="get_ran_cu_config",
        description="Read the committed CU configuration",
        params=(),
        mutating=False,
        allowed_agents=frozenset({RESPONSE_ROLE}),
        handler=lambda p: sim.get_ran_cu_config().to_dict(),
    ))
    reg.register(ToolSpec(
        name="update_ran_cu_config",
        description="Propose CU config changes (approval-gated; workflow-executed)",
        params=(ToolParam("changes", "list"),),
        mutating=True,
        allowed_agents=frozenset(),
        handler=None,
    ))
    reg.register(ToolSpec(
        name="reboot_ran",
        description="Reboot the RAN to activate the latest config (workflow-executed)",
        params=(),
        mutating=True,
        allowed_agents=frozenset(),
        handler=None,
    ))
    return reg


def _technique_dict(corpus: Corpus, technique_id: str) -> dict:
    t = corpus.get_technique(technique_id)
    return {
        "technique_id": t.technique_id,
        "name": t.name,
        "description": t.description,
        "tactic_ids": list(t.tactic_ids),
        "mitigations": [
            {"mitigation_id": m.mitigation_id, "name": m.name, "guidance": m.guidance}
            for m in t.mitigations
        ],
    }


def plan_catalog(registry: ToolRegistry) -> dict[str, ToolSpec]:
    """Tools a response plan may reference: the control API catalog."""
    return {
        name: registry.get(name)
        for name in ("get_ran_cu_config", "update_ran_cu_config", "reboot_ran")
        if registry.get(name) is not None
    }
