"""Scenario fixtures, repeated-run orchestration, and metric computation.

Metrics per scenario over R runs: Top-3 (any ground-truth technique in the
retrieved top three), Top-1 (a ground-truth technique at rank one), and CCR
(tool correct-calling ratio: the set of catalog tools invoked equals the
scenario's expected set, order and repeats ignored). Means are unweighted
across scenarios.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .agent import ScriptedProvider
from .errors import MissingScenarioDefinition, ScenarioFixtureMissing
from .kb import Corpus, VectorIndex, build_index, load_corpus
from .pipeline import Orchestrator
from .ran import RANSimulator
from .telemetry import TelemetryStore

FIXTURES_DIR = Path(__file__).parent / "fixtures"
DEFAULT_RUNS = 5

SCENARIO_IDS = [
    "BTS-Attack-1", "BTS-Attack-2", "BTS-Attack-3",
    "Blind-DoS-1", "Blind-DoS-2", "Blind-DoS-3",
    "Downlink-DoS", "Downlink-IMSI", "Null-Cipher-Integrity", "Uplink-IMSI",
]


@dataclass
class Scenario:
    scenario_id: str
    description: str
    trace_path: Path
    ground_truth_technique_ids: list[str]
    expected_tool_set: set[str]
    expected_terminal: str
    script_path: Path
    event: dict

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ScenarioFixtureMissing(f"cannot read scenario {path}: {exc}") from exc
        base = path.parent.parent
        sc = cls(
            scenario_id=doc["scenario_id"],
            description=doc["description"],
            trace_path=base / doc["trace_path"],
            ground_truth_technique_ids=list(doc["ground_truth_technique_ids"]),
            expected_tool_set=set(doc["expected_tool_set"]),
            expected_terminal=doc["expected_terminal"],
            script_path=base / doc["script_path"],
            event=dict(doc["event"]),
        )
        if not sc.trace_path.exists():
            raise ScenarioFixtureMissing(f"missing trace {sc.trace_path}")
        if not sc.script_path.exists():
            raise ScenarioFixtureMissing(f"missing script {sc.script_path}")
        return sc


def load_scenarios(directory: str | Path | None = None,
                   only: list[str] | None = None) -> list[Scenario]:
    directory = Path(directory) if directory else FIXTURES_DIR / "scenarios"
    wanted = only or SCENARIO_IDS
    out = []
    for sid in wanted:
        p = directory / f"{sid}.json"
        if not p.exists():
            raise ScenarioFixtureMissing(f"no scenario manifest for {sid!r} in {directory}")
        out.append(Scenario.load(p))
    return out


@dataclass
class RunRecord:
    scenario_id: str
    run_index: int
    retrieved_top3: list[str]
    tool_calls_made: list[str]
    terminal_phase: str
    latency_ms: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "run_index": self.run_index,
            "retrieved_top3": list(self.retrieved_top3),
            "tool_calls_made": list(self.tool_calls_made),
            "terminal_phase": self.terminal_phase,
            "latency_ms": dict(self.latency_ms),
        }


@dataclass
class ScenarioMetrics:
    scenario_id: str
    top1: float
    top3: float
    ccr: float


@dataclass
class MetricsReport:
    per_scenario: list[ScenarioMetrics]
    mean_top1: float
    mean_top3: float
    mean_ccr: float
    latency_percentiles_ms: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_scenario": [
                {"scenario_id": m.scenario_id, "top3": m.top3, "top1": m.top1, "ccr": m.ccr}
                for m in self.per_scenario
            ],
            "mean": {"top3": self.mean_top3, "top1": self.mean_top1, "ccr": self.mean_ccr},
            "latency_percentiles_ms": dict(self.latency_percentiles_ms),
        }


def run_scenario_once(scenario: Scenario, corpus: Corpus, index: VectorIndex,
                      run_index: int = 1) -> tuple[RunRecord, Orchestrator]:
    """One scenario execution against a fresh simulator and store."""
    store = TelemetryStore()
    with open(scenario.trace_path, encoding="utf-8") as fh:
        store.ingest_trace(scenario.scenario_id, fh)
    sim = RANSimulator()
    provider = ScriptedProvider.from_file(scenario.script_path)
    # Scripted suites auto-approve pending requests so mitigated scenarios can
    # complete headlessly; the human gate itself is still exercised (decide()
    # runs with an explicit operator identity).
    orch = Orchestrator(
        store, corpus, index, sim, provider,
        approval_policy=lambda req: "approved",
    )
    ev = scenario.event
    event = store.add_event(
        source=ev["source"], description=ev["description"],
        severity_hint=ev.get("severity_hint"), telemetry_ref=ev.get("telemetry_ref"),
        affected_ue_ids=ev.get("affected_ue_ids"),
    )
    inc = orch.handle_incident(event, scenario_id=scenario.scenario_id)
    retrieved = [t for t, _ in inc.classification.candidates] if inc.classification else []
    record = RunRecord(
        scenario_id=scenario.scenario_id,
        run_index=run_index,
        retrieved_top3=retrieved[:3],
        tool_calls_made=inc.tool_calls_made(),
        terminal_phase=inc.phase,
        latency_ms={**inc.latencies_ms, "total": inc.total_latency_ms()},
    )
    return record, orch


def run_suite(scenarios: list[Scenario], corpus: Corpus, index: VectorIndex,
              runs_per_scenario: int = DEFAULT_RUNS) -> list[RunRecord]:
    records: list[RunRecord] = []
    for scenario in scenarios:
        for r in range(1, runs_per_scenario + 1):
            record, _ = run_scenario_once(scenario, corpus, index, run_index=r)
            records.append(record)
    return records


def compute_metrics(records: list[RunRecord], scenarios: list[Scenario],
                    catalog_tools: set[str] | None = None) -> MetricsReport:
    if not records:
        return MetricsReport([], 0.0, 0.0, 0.0)
    by_id = {s.scenario_id: s for s in scenarios}
    grouped: dict[str, list[RunRecord]] = {}
    for rec in records:
        if rec.scenario_id not in by_id:
            raise MissingScenarioDefinition(f"no scenario for record {rec.scenario_id!r}")
        grouped.setdefault(rec.scenario_id, []).append(rec)

    per: list[ScenarioMetrics] = []
    totals: list[float] = []
    for sid in sorted(grouped, key=lambda s: SCENARIO_IDS.index(s) if s in SCENARIO_IDS else 99):
        runs = grouped[sid]
        scenario = by_id[sid]
        gt = set(scenario.ground_truth_technique_ids)
        n = len(runs)
        top3_hits = sum(1 for r in runs if gt & set(r.retrieved_top3))
        top1_hits = sum(1 for r in runs if r.retrieved_top3 and r.retrieved_top3[0] in gt)
        ccr_hits = 0
        for r in runs:
            made = set(r.tool_calls_made)
            if catalog_tools is not None:
                made &= catalog_tools
            if made == scenario.expected_tool_set:
                ccr_hits += 1
            totals.append(r.latency_ms.get("total", 0.0))
        per.append(ScenarioMetrics(sid, top1_hits / n, top3_hits / n, ccr_hits / n))

    k = len(per)
    report = MetricsReport(
        per_scenario=per,
        mean_top1=sum(m.top1 for m in per) / k,
        mean_top3=sum(m.top3 for m in per) / k,
        mean_ccr=sum(m.ccr for m in per) / k,
    )
    if totals:
        srt = sorted(totals)
        report.latency_percentiles_ms = {
            "p50": _percentile(srt, 0.50),
            "p90": _percentile(srt, 0.90),
            "p99": _percentile(srt, 0.99),
        }
    return report


def _percentile(sorted_vals: list[float], q: float) -> float:
    if not sorted_vals:
        return 0.0
    idx = min(len(sorted_vals) - 1, max(0, round(q * (len(sorted_vals) - 1))))
    return sorted_vals[idx]


def emit_report(report: MetricsReport, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True)
    lines = [f"{'Threat':<24}{'Top-3':>8}{'Top-1':>8}{'CCR':>8}", "-" * 48]
    for m in report.per_scenario:
        lines.append(f"{m.scenario_id:<24}{m.top3:>8.2f}{m.top1:>8.2f}{m.ccr:>8.2f}")
    if report.per_scenario:
        lines.append("-" * 48)
        lines.append(
            f"{'Mean':<24}{report.mean_top3:>8.2f}{report.mean_top1:>8.2f}"
            f"{report.mean_ccr:>8.2f}"
        )
    return "\n".join(lines)


def load_default_kb() -> tuple[Corpus, VectorIndex]:
    corpus = load_corpus(FIXTURES_DIR / "corpus.json")
    return corpus, build_index(corpus)
