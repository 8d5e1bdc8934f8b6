"""HTTP/JSON service: incident lifecycle, approval queue, kb lookups, audit.

Incidents run on worker threads; an incident that reaches the approval gate
suspends on a decision event, so other incidents keep progressing. Every
error response carries a machine code from the closed set below.
"""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path

from fastapi import Body, FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse

from . import evalkit, kb
from .agent import RemoteProvider, ScriptedProvider
from .errors import (
    AlreadyDecided,
    RanShieldError,
    UnknownApprovalId,
    UnknownIncident,
    UnknownTechniqueId,
)
from .pipeline import Orchestrator
from .ran import RANSimulator
from .telemetry import TelemetryStore

ERROR_STATUS = {
    "UNKNOWN_INCIDENT": 404,
    "UNKNOWN_APPROVAL": 404,
    "UNKNOWN_TECHNIQUE": 404,
    "UNKNOWN_TRACE_ID": 404,
    "ALREADY_DECIDED": 409,
    "VERSION_CONFLICT": 409,
    "NOT_APPROVED": 409,
    "INVALID_WINDOW": 400,
    "EMPTY_CHANGE_SET": 400,
    "SCHEMA_VIOLATION": 400,
    "BAD_REQUEST": 400,
    "EMPTY_INDEX": 503,
    "INTERNAL": 500,
}


def _provider_from_config(config: dict):
    provider_cfg = dict(config.get("provider", {"kind": "scripted"}))
    kind = provider_cfg.get("kind", "scripted")
    if kind == "scripted":
        script: dict[str, str] = {}
        scripts_dir = provider_cfg.get("scripts_dir") or str(
            evalkit.FIXTURES_DIR / "scripts"
        )
        for path in sorted(Path(scripts_dir).glob("*.json")):
            script.update(json.loads(path.read_text(encoding="utf-8")))
        return ScriptedProvider(script)
    if kind == "remote":
        endpoint = os.environ.get("RANSHIELD_PROVIDER_ENDPOINT", provider_cfg.get("endpoint"))
        model = os.environ.get("RANSHIELD_PROVIDER_MODEL", provider_cfg.get("model"))
        token = os.environ.get("RANSHIELD_PROVIDER_TOKEN", provider_cfg.get("auth_token", ""))
        if not endpoint or not model:
            raise ValueError("remote provider requires endpoint and model")
        return RemoteProvider(endpoint, model, token,
                              timeout_s=float(provider_cfg.get("timeout_s", 30.0)))
    raise ValueError(f"unknown provider kind {kind!r}")


def create_app(config: dict | None = None) -> FastAPI:
    config = config or {}
    corpus_path = config.get("corpus_path") or str(evalkit.FIXTURES_DIR / "corpus.json")
    corpus = kb.load_corpus(corpus_path)
    index = kb.build_index(corpus)
    store = TelemetryStore()
    ttl = config.get("approval_ttl_s")
    sim = RANSimulator(approval_ttl_us=int(ttl * 1e6) if ttl else None)
    provider = _provider_from_config(config)
    orch = Orchestrator(store, corpus, index, sim, provider)

    # Preload fixture traces so scenario-shaped events can correlate telemetry.
    traces_dir = Path(config.get("traces_dir") or evalkit.FIXTURES_DIR / "traces")
    if traces_dir.is_dir():
        for trace_file in sorted(traces_dir.glob("*.jsonl")):
            with open(trace_file, encoding="utf-8") as fh:
                store.ingest_trace(trace_file.stem, fh)

    app = FastAPI(title="ranshield", version="0.1.0")
    app.state.orchestrator = orch
    app.state.workers: list[threading.Thread] = []

    @app.exception_handler(RanShieldError)
    async def _handle_domain_error(request: Request, exc: RanShieldError):
        status = ERROR_STATUS.get(exc.code, 500)
        return JSONResponse(
            status_code=status,
            content={"code": exc.code, "message": str(exc)},
        )

    def _error(code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=ERROR_STATUS.get(code, 400),
                            content={"code": code, "message": message})

    # -- incidents --------------------------------------------------------

    @app.post("/incidents", status_code=202)
    def post_incident(body: dict = Body(...)):
        try:
            event = store.add_event(
                source=body.get("source", "operator"),
                description=body.get("description", ""),
                severity_hint=body.get("severity_hint"),
                telemetry_ref=body.get("telemetry_ref"),
                affected_ue_ids=body.get("affected_ue_ids"),
            )
        except ValueError as exc:
            return _error("BAD_REQUEST", str(exc))
        scenario_id = body.get("scenario_id") or event.telemetry_ref or "adhoc"
        result_box: dict = {}

        def work():
            inc = orch.handle_incident(event, scenario_id=scenario_id,
                                       block_on_approval=True)
            result_box["incident_id"] = inc.incident_id

        # handle_incident assigns the id synchronously at its start; run the
        # first phase inline so we can return the id, then let it continue.
        worker = threading.Thread(target=work, daemon=True)
        worker.start()
        app.state.workers.append(worker)
        # Wait for the incident record to exist (creation is immediate).
        deadline = time.monotonic() + 5.0
        incident_id = None
        while time.monotonic() < deadline:
            with orch._lock:
                for iid, inc in orch.incidents.items():
                    if inc.event.event_id == event.event_id:
                        incident_id = iid
                        break
            if incident_id:
                break
            time.sleep(0.005)
        return {"incident_id": incident_id, "event_id": event.event_id}

    @app.get("/incidents")
    def list_incidents():
        return [
            {"incident_id": inc.incident_id, "phase": inc.phase,
             "scenario_id": inc.scenario_id,
             "risk": inc.report.risk if inc.report else None}
            for inc in orch.incidents.values()
        ]

    @app.get("/incidents/{incident_id}")
    def get_incident(incident_id: str):
        try:
            return orch.get_incident(incident_id).to_dict()
        except UnknownIncident as exc:
            return _error("UNKNOWN_INCIDENT", str(exc))

    # -- approvals --------------------------------------------------------

    @app.get("/approvals")
    def list_approvals(status: str | None = Query(default=None),
                       wait: int = Query(default=0, ge=0, le=30000)):
        deadline = time.monotonic() + wait / 1000.0
        while True:
            reqs = sim.list_approvals(status=status)
            if reqs or time.monotonic() >= deadline:
                return [r.to_dict() for r in reqs]
            time.sleep(0.05)

    @app.post("/approvals/{approval_id}/decision")
    def decide(approval_id: str, body: dict = Body(...),
               x_operator_id: str | None = Header(default=None)):
        decision = body.get("decision")
        if decision not in {"approve", "reject"}:
            return _error("BAD_REQUEST", "decision must be 'approve' or 'reject'")
        if not x_operator_id:
            return _error("BAD_REQUEST", "X-Operator-Id header required")
        mapped = "approved" if decision == "approve" else "rejected"
        try:
            req = orch.decide_approval(approval_id, mapped, x_operator_id)
        except (AlreadyDecided, UnknownApprovalId) as exc:
            return _error(exc.code, str(exc))
        return req.to_dict()

    # -- knowledge base ---------------------------------------------------

    @app.get("/kb/techniques/{technique_id}")
    def get_technique(technique_id: str):
        try:
            t = corpus.get_technique(technique_id)
        except UnknownTechniqueId as exc:
            return _error("UNKNOWN_TECHNIQUE", str(exc))
        return {
            "technique_id": t.technique_id, "name": t.name,
            "description": t.description, "tactic_ids": list(t.tactic_ids),
            "mitigations": [
                {"mitigation_id": m.mitigation_id, "name": m.name, "guidance": m.guidance}
                for m in t.mitigations
            ],
            "source_version": t.source_version,
        }

    @app.get("/kb/search")
    def kb_search(q: str = Query(...), k: int = Query(default=3, ge=1, le=50)):
        results = index.search(q, k)
        return [
            {"technique_id": r.technique_id, "score": r.score, "rank": r.rank}
            for r in results
        ]

    # -- audit ------------------------------------------------------------

    @app.get("/audit")
    def audit(kind: str | None = Query(default=None),
              incident_id: str | None = Query(default=None)):
        return sim.get_audit_log(kind=kind, incident_id=incident_id)

    return app


def run_service(config: dict) -> None:
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.get("listen_host", "127.0.0.1"),
                port=int(config.get("listen_port", 8470)))
