"""Three-stage incident orchestration: analysis, classification, response.

An incident moves through a closed phase graph; the approval wait is a
suspension point, so an orchestrator can either resolve it inline through an
approval policy (evaluation runs), block a worker thread on a decision event
(service mode), or return control to the caller and resume later (CLI mode).
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .agent import AgentTranscript, CompletionProvider, run_react_loop
from .errors import EscalatedConfigurationError, UnknownIncident
from .kb import Corpus, Mitigation, VectorIndex
from .ran import CHANGE_OPS, ApprovalRequest, ConfigTuningWorkflow, RANSimulator, _path_rule
from .telemetry import TelemetryStore, ThreatEvent
from .tools import PLAN_ORDERING, build_registry, plan_catalog

TOP_K = 3
CONFIDENCE_FLOOR = 0.05

VERDICTS = {"threat", "benign", "false_positive"}
RISKS = {"low", "medium", "high"}

TERMINAL_PHASES = {"mitigated", "closed_benign", "escalated", "failed"}


@dataclass
class ThreatReport:
    incident_id: str
    verdict: str
    event_summary: str
    affected_components: list[str]
    risk: str
    evidence_refs: list[dict] = field(default_factory=list)
    produced_by: str = ""

    def to_dict(self) -> dict:
        return {
            "incident_id": self.incident_id,
            "verdict": self.verdict,
            "event_summary": self.event_summary,
            "affected_components": list(self.affected_components),
            "risk": self.risk,
            "evidence_refs": list(self.evidence_refs),
            "produced_by": self.produced_by,
        }


@dataclass
class Classification:
    incident_id: str
    candidates: list[tuple[str, float]]
    selected_technique_ids: list[str]
    mitigation_guidance: list[Mitigation]
    confidence: float

    def to_dict(self) -> dict:
        return {
            "incident_id": self.incident_id,
            "candidates": [{"technique_id": t, "score": s} for t, s in self.candidates],
            "selected_technique_ids": list(self.selected_technique_ids),
            "mitigation_guidance": [
                {"mitigation_id": m.mitigation_id, "name": m.name, "guidance": m.guidance}
                for m in self.mitigation_guidance
            ],
            "confidence": self.confidence,
        }


@dataclass
class PlanStep:
    step_no: int
    tool_name: str
    params: dict
    rationale: str

    def to_dict(self) -> dict:
        return {
            "step_no": self.step_no,
            "tool_name": self.tool_name,
            "params": self.params,
            "rationale": self.rationale,
        }


@dataclass
class ActionPlan:
    plan_id: str
    incident_id: str
    steps: list[PlanStep]
    status: str = "draft"  # draft -> validated -> awaiting_approval -> executing -> completed | rejected; draft -> failed

    def to_dict(self) -> dict:
        return {
            "plan_id": self.plan_id,
            "incident_id": self.incident_id,
            "steps": [s.to_dict() for s in self.steps],
            "status": self.status,
        }


@dataclass
class Recommendation:
    incident_id: str
    guidance: list[str]
    reason: str  # no_viable_plan | plan_validation_failed | guardrail_abort | iteration_limit | provider_failure

    def to_dict(self) -> dict:
        return {
            "incident_id": self.incident_id,
            "guidance": list(self.guidance),
            "reason": self.reason,
        }


@dataclass
class IncidentState:
    incident_id: str
    event: ThreatEvent
    scenario_id: str
    phase: str = "received"
    transitions: list[dict] = field(default_factory=list)
    report: ThreatReport | None = None
    classification: Classification | None = None
    plan: ActionPlan | None = None
    recommendation: Recommendation | None = None
    transcripts: list[AgentTranscript] = field(default_factory=list)
    approval_id: str | None = None
    latencies_ms: dict[str, float] = field(default_factory=dict)
    escalation_reason: str | None = None

    @property
    def terminal(self) -> bool:
        return self.phase in TERMINAL_PHASES

    def total_latency_ms(self) -> float:
        return sum(self.latencies_ms.values())

    def tool_calls_made(self) -> list[str]:
        calls: list[str] = []
        for t in self.transcripts:
            calls.extend(t.tool_calls())
        if self.plan is not None and self.plan.status in {"awaiting_approval", "executing", "completed"}:
            calls.extend(s.tool_name for s in self.plan.steps)
        return calls

    def to_dict(self) -> dict:
        return {
            "incident_id": self.incident_id,
            "scenario_id": self.scenario_id,
            "phase": self.phase,
            "event": self.event.to_dict(),
            "transitions": list(self.transitions),
            "report": self.report.to_dict() if self.report else None,
            "classification": self.classification.to_dict() if self.classification else None,
            "plan": self.plan.to_dict() if self.plan else None,
            "recommendation": self.recommendation.to_dict() if self.recommendation else None,
            "approval_id": self.approval_id,
            "latencies_ms": dict(self.latencies_ms),
            "total_latency_ms": self.total_latency_ms(),
            "escalation_reason": self.escalation_reason,
            "transcripts": [
                {
                    "agent_role": t.agent_role,
                    "outcome": t.outcome,
                    "steps": [s.to_dict() for s in t.steps],
                }
                for t in self.transcripts
            ],
        }


def validate_plan(steps: list[PlanStep], catalog: dict, path_table: dict) -> list[str]:
    """Return all violations (empty list means the plan is valid)."""
    violations: list[str] = []
    for i, step in enumerate(steps, start=1):
        if step.step_no != i:
            violations.append(f"step_no not dense at position {i} (got {step.step_no})")
    seen: list[str] = []
    for step in steps:
        spec = catalog.get(step.tool_name)
        if spec is None:
            violations.append(f"unknown tool {step.tool_name!r}")
            seen.append(step.tool_name)
            continue
        for p in spec.params:
            if p.required and p.name not in step.params:
                violations.append(f"step {step.step_no}: missing param {p.name!r}")
        for before in PLAN_ORDERING.get(step.tool_name, []):
            if before not in seen:
                violations.append(
                    f"step {step.step_no}: {step.tool_name} must follow {before}"
                )
        if step.tool_name == "update_ran_cu_config":
            changes = step.params.get("changes")
            if not isinstance(changes, list) or not changes:
                violations.append(f"step {step.step_no}: empty change set")
            else:
                for ch in changes:
                    if not isinstance(ch, dict) or "path" not in ch or "op" not in ch:
                        violations.append(f"step {step.step_no}: malformed change {ch!r}")
                        continue
                    if ch["op"] not in CHANGE_OPS:
                        violations.append(f"step {step.step_no}: unknown op {ch['op']!r}")
                    try:
                        _path_rule(path_table, str(ch["path"]))
                    except Exception:
                        violations.append(
                            f"step {step.step_no}: unknown config path {ch['path']!r}"
                        )
        seen.append(step.tool_name)
    mutating = [s for s in steps if catalog.get(s.tool_name) and catalog[s.tool_name].mutating]
    if not any(s.tool_name == "update_ran_cu_config" for s in mutating):
        violations.append("plan contains no approval-gated mutation step")
    return violations


class Orchestrator:
    """Wires telemetry, kb, agents, and the control plane into one lifecycle."""

    def __init__(
        self,
        store: TelemetryStore,
        corpus: Corpus,
        index: VectorIndex,
        sim: RANSimulator,
        provider: CompletionProvider,
        lifecycle_log_path: str | Path | None = None,
        approval_policy: Callable[[ApprovalRequest], str] | None = None,
        confidence_floor: float = CONFIDENCE_FLOOR,
    ):
        self.store = store
        self.corpus = corpus
        self.index = index
        self.sim = sim
        self.provider = provider
        self.registry = build_registry(store, corpus, index, sim)
        self.catalog = plan_catalog(self.registry)
        self.path_table = sim._path_table
        self.approval_policy = approval_policy
        self.confidence_floor = confidence_floor
        self.incidents: dict[str, IncidentState] = {}
        self._workflows: dict[str, ConfigTuningWorkflow] = {}
        self._waiters: dict[str, threading.Event] = {}
        self._seq = 0
        self._lock = threading.Lock()
        self._log_path = Path(lifecycle_log_path) if lifecycle_log_path else None

    # -- state plumbing ---------------------------------------------------

    def _new_incident(self, event: ThreatEvent, scenario_id: str) -> IncidentState:
        with self._lock:
            self._seq += 1
            inc = IncidentState(
                incident_id=f"INC-{self._seq:04d}", event=event, scenario_id=scenario_id
            )
            self.incidents[inc.incident_id] = inc
            return inc

    def _transition(self, inc: IncidentState, phase: str, detail: str = "") -> None:
        if inc.terminal:
            raise RuntimeError(f"incident {inc.incident_id} already terminal ({inc.phase})")
        entry = {
            "ts": time.time_ns() // 1000,
            "incident_id": inc.incident_id,
            "phase_from": inc.phase,
            "phase_to": phase,
            "detail": detail,
        }
        inc.transitions.append(entry)
        inc.phase = phase
        if self._log_path is not None:
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def get_incident(self, incident_id: str) -> IncidentState:
        inc = self.incidents.get(incident_id)
        if inc is None:
            raise UnknownIncident(f"no incident {incident_id!r}")
        return inc

    # -- stage 1: analysis ------------------------------------------------

    def run_analysis(self, inc: IncidentState) -> ThreatReport | None:
        event = inc.event
        context = (
            f"Incident event {event.event_id} from {event.source}: {event.description}\n"
            f"Severity hint: {event.severity_hint or 'none'}\n"
            f"Trace available: {event.telemetry_ref or 'none'}\n"
            f"Affected UEs: {', '.join(event.affected_ue_ids) or 'unknown'}"
        )
        transcript = run_react_loop(
            "analysis", self.provider, self.registry, context,
            scenario_id=inc.scenario_id,
        )
        inc.transcripts.append(transcript)
        if transcript.outcome != "final_answer":
            inc.escalation_reason = transcript.outcome
            return None
        payload = transcript.final_payload or {}
        verdict = payload.get("verdict")
        summary = payload.get("event_summary", "")
        components = payload.get("affected_components", [])
        risk = payload.get("risk", "medium")
        if verdict not in VERDICTS or risk not in RISKS or not isinstance(components, list):
            inc.escalation_reason = "guardrail_abort"
            return None
        if verdict == "threat" and (not summary or not components):
            inc.escalation_reason = "guardrail_abort"
            return None
        return ThreatReport(
            incident_id=inc.incident_id,
            verdict=verdict,
            event_summary=str(summary),
            affected_components=[str(c) for c in components],
            risk=risk,
            evidence_refs=list(payload.get("evidence_refs", [])),
            produced_by=f"{inc.incident_id}/analysis",
        )

    # -- stage 2: classification ------------------------------------------

    def run_classification(self, inc: IncidentState) -> Classification | None:
        report = inc.report
        assert report is not None and report.verdict == "threat"
        if len(self.index) == 0:
            raise EscalatedConfigurationError("kb index is empty")
        query = report.event_summary + " " + " ".join(report.affected_components)
        results = self.index.search(query, TOP_K)
        candidates = [(r.technique_id, r.score) for r in results]
        if not candidates or max(s for _, s in candidates) < self.confidence_floor:
            inc.escalation_reason = "low_confidence"
            return None
        candidate_ids = [t for t, _ in candidates]
        docs = ["Retrieved candidate techniques (choose only from these):"]
        for tid, score in candidates:
            tech = self.corpus.get_technique(tid)
            docs.append(f"{tid} (score {score:.4f}): {tech.name}. {tech.description}")
        context = (
            f"Threat report for {inc.incident_id}: {report.event_summary}\n"
            f"Affected components: {', '.join(report.affected_components)}\n"
            f"Risk: {report.risk}"
        )
        transcript = run_react_loop(
            "classification", self.provider, self.registry, context,
            documents=docs, scenario_id=inc.scenario_id,
        )
        inc.transcripts.append(transcript)
        if transcript.outcome != "final_answer":
            inc.escalation_reason = transcript.outcome
            return None
        selected = (transcript.final_payload or {}).get("selected_technique_ids")
        if (
            not isinstance(selected, list)
            or not selected
            or not set(selected) <= set(candidate_ids)
        ):
            # Selection outside the retrieved candidates is a hallucination.
            inc.escalation_reason = "guardrail_abort"
            return None
        guidance: list[Mitigation] = []
        for tid in selected:
            guidance.extend(self.corpus.get_mitigations(tid))
        return Classification(
            incident_id=inc.incident_id,
            candidates=candidates,
            selected_technique_ids=[str(t) for t in selected],
            mitigation_guidance=guidance,
            confidence=max(s for _, s in candidates),
        )

    # -- stage 3: response planning ---------------------------------------

    def run_response_planning(self, inc: IncidentState) -> ActionPlan | Recommendation:
        classification = inc.classification
        assert classification is not None
        guidance_text = [m.guidance for m in classification.mitigation_guidance]
        docs = ["Mitigation guidance for the classified technique(s):"]
        docs.extend(guidance_text)
        docs.append(
            "Safe control API catalog: "
            + ", ".join(sorted(self.catalog))
        )
        context = (
            f"Incident {inc.incident_id} classified as "
            f"{', '.join(classification.selected_technique_ids)}.\n"
            f"Report: {inc.report.event_summary if inc.report else ''}"
        )
        transcript = run_react_loop(
            "response", self.provider, self.registry, context,
            documents=docs, scenario_id=inc.scenario_id,
        )
        inc.transcripts.append(transcript)
        if transcript.outcome != "final_answer":
            return Recommendation(inc.incident_id, guidance_text, transcript.outcome)
        payload = transcript.final_payload or {}
        if payload.get("no_plan"):
            return Recommendation(inc.incident_id, guidance_text, "no_viable_plan")
        raw_steps = (payload.get("plan") or {}).get("steps")
        if not isinstance(raw_steps, list) or not raw_steps:
            return Recommendation(inc.incident_id, guidance_text, "plan_validation_failed")
        steps = [
            PlanStep(
                step_no=i,
                tool_name=str(s.get("tool_name", "")),
                params=s.get("params") if isinstance(s.get("params"), dict) else {},
                rationale=str(s.get("rationale", "")),
            )
            for i, s in enumerate(raw_steps, start=1)
        ]
        plan = ActionPlan(
            plan_id=f"{inc.incident_id}/plan", incident_id=inc.incident_id, steps=steps
        )
        violations = validate_plan(steps, self.catalog, self.path_table)
        if violations:
            plan.status = "failed"
            inc.plan = plan
            return Recommendation(inc.incident_id, guidance_text, "plan_validation_failed")
        plan.status = "validated"
        return plan

    # -- lifecycle --------------------------------------------------------

    def handle_incident(
        self,
        event: ThreatEvent,
        scenario_id: str | None = None,
        block_on_approval: bool = False,
    ) -> IncidentState:
        """Run the pipeline; may return a non-terminal state when an approval
        is pending and neither a policy nor blocking mode is configured."""
        inc = self._new_incident(event, scenario_id or event.telemetry_ref or "adhoc")

        t0 = time.monotonic()
        inc.report = self.run_analysis(inc)
        inc.latencies_ms["analysis"] = (time.monotonic() - t0) * 1000
        if inc.report is None:
            self._transition(inc, "escalated", inc.escalation_reason or "analysis_failed")
            return inc
        self._transition(inc, "analyzed", f"verdict={inc.report.verdict}")
        if inc.report.verdict != "threat":
            self._transition(inc, "closed_benign", inc.report.verdict)
            return inc

        t0 = time.monotonic()
        inc.classification = self.run_classification(inc)
        inc.latencies_ms["classification"] = (time.monotonic() - t0) * 1000
        if inc.classification is None:
            self._transition(inc, "escalated", inc.escalation_reason or "classification_failed")
            return inc
        self._transition(
            inc, "classified", ",".join(inc.classification.selected_technique_ids)
        )

        t0 = time.monotonic()
        outcome = self.run_response_planning(inc)
        inc.latencies_ms["planning"] = (time.monotonic() - t0) * 1000
        if isinstance(outcome, Recommendation):
            inc.recommendation = outcome
            self._transition(inc, "escalated", f"recommendation:{outcome.reason}")
            return inc

        inc.plan = outcome
        self._transition(inc, "planned", outcome.plan_id)
        return self._dispatch_plan(inc, block_on_approval)

    def _dispatch_plan(self, inc: IncidentState, block_on_approval: bool) -> IncidentState:
        plan = inc.plan
        assert plan is not None
        update_step = next(
            s for s in plan.steps if s.tool_name == "update_ran_cu_config"
        )
        wf = ConfigTuningWorkflow(self.sim)
        self._workflows[inc.incident_id] = wf
        result = wf.propose(plan.plan_id, inc.incident_id, update_step.params["changes"])
        if not isinstance(result, ApprovalRequest):
            plan.status = "failed"
            self._transition(inc, "failed", f"workflow:{result.reason}")
            return inc
        plan.status = "awaiting_approval"
        inc.approval_id = result.approval_id
        self._transition(inc, "awaiting_approval", result.approval_id)

        if self.approval_policy is not None:
            t0 = time.monotonic()
            decision = self.approval_policy(result)
            self.sim.decide(result.approval_id, decision, "policy")
            inc.latencies_ms["approval_wait"] = (time.monotonic() - t0) * 1000
            return self._finish_plan(inc)
        if block_on_approval:
            event = threading.Event()
            with self._lock:
                self._waiters[result.approval_id] = event
            t0 = time.monotonic()
            event.wait()
            inc.latencies_ms["approval_wait"] = (time.monotonic() - t0) * 1000
            return self._finish_plan(inc)
        return inc  # caller resumes via resume_after_decision

    def decide_approval(self, approval_id: str, decision: str, operator_id: str):
        req = self.sim.decide(approval_id, decision, operator_id)
        with self._lock:
            waiter = self._waiters.pop(approval_id, None)
        if waiter is not None:
            waiter.set()
        return req

    def resume_after_decision(self, incident_id: str) -> IncidentState:
        inc = self.get_incident(incident_id)
        if inc.terminal:
            return inc
        if inc.phase != "awaiting_approval":
            raise RuntimeError(f"incident {incident_id} is not awaiting approval")
        return self._finish_plan(inc)

    def _finish_plan(self, inc: IncidentState) -> IncidentState:
        plan = inc.plan
        assert plan is not None and inc.approval_id is not None
        wf = self._workflows[inc.incident_id]
        req = self.sim.get_approval(inc.approval_id)
        if req.status == "rejected":
            plan.status = "rejected"
            self._transition(inc, "failed", "approval rejected")
            return inc
        plan.status = "executing"
        self._transition(inc, "executing", inc.approval_id)
        t0 = time.monotonic()
        result = wf.finish(inc.approval_id)
        inc.latencies_ms["execution"] = (time.monotonic() - t0) * 1000
        if result.status == "completed":
            plan.status = "completed"
            self._transition(inc, "mitigated", f"config v{result.to_version}")
        else:
            plan.status = "failed"
            self._transition(inc, "failed", f"workflow:{result.reason}")
        return inc
