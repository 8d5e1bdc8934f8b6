"""Simulated RAN control plane: CU config store, approval gate, reboot, audit.

The design principle is parameter-only planning: the config tuning workflow
owns its step order (fetch, propose, wait for a human decision, apply,
reboot, verify) and a plan can only supply the change values. The config
mutation vocabulary is a closed set {set, remove_list_item, add_list_item}
over a typed path table loaded from a data file, so widening the controllable
surface is a data change, not a code change.
"""

from __future__ import annotations

import copy
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    AlreadyDecided,
    EmptyChangeSet,
    InvariantViolation,
    NotApproved,
    UnknownApprovalId,
    UnknownPath,
    VersionConflict,
)

_DEFAULT_PATH_TABLE = Path(__file__).parent / "data" / "config_paths.json"

CHANGE_OPS = {"set", "remove_list_item", "add_list_item"}


@dataclass
class CUConfig:
    version: int
    ciphering_algorithms: list[str]
    integrity_algorithms: list[str]
    plmn: str
    cell_id: str
    other_params: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "security": {
                "ciphering_algorithms": list(self.ciphering_algorithms),
                "integrity_algorithms": list(self.integrity_algorithms),
            },
            "cell": {"plmn": self.plmn, "cell_id": self.cell_id},
            "other_params": dict(self.other_params),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CUConfig":
        sec = doc.get("security", {})
        cell = doc.get("cell", {})
        return cls(
            version=int(doc.get("version", 1)),
            ciphering_algorithms=list(sec.get("ciphering_algorithms", [])),
            integrity_algorithms=list(sec.get("integrity_algorithms", [])),
            plmn=str(cell.get("plmn", "")),
            cell_id=str(cell.get("cell_id", "")),
            other_params=dict(doc.get("other_params", {})),
        )

    def _resolve(self, path: str):
        """Return (container, key) for a dotted path, or raise UnknownPath."""
        if path == "security.ciphering_algorithms":
            return self, "ciphering_algorithms"
        if path == "security.integrity_algorithms":
            return self, "integrity_algorithms"
        if path == "cell.plmn":
            return self, "plmn"
        if path == "cell.cell_id":
            return self, "cell_id"
        if path.startswith("other_params.") and len(path) > len("other_params."):
            return self.other_params, path.split(".", 1)[1]
        raise UnknownPath(path)

    def get_path(self, path: str):
        container, key = self._resolve(path)
        if isinstance(container, dict):
            return container.get(key)
        return getattr(container, key)


@dataclass(frozen=True)
class ConfigChange:
    path: str
    op: str
    value: object

    def to_dict(self) -> dict:
        return {"path": self.path, "op": self.op, "value": self.value}


@dataclass
class ConfigDiff:
    base_version: int
    changes: list[ConfigChange]

    def to_dict(self) -> dict:
        return {
            "base_version": self.base_version,
            "changes": [c.to_dict() for c in self.changes],
        }


@dataclass
class ApprovalRequest:
    approval_id: str
    incident_id: str
    plan_id: str
    diff: ConfigDiff
    rendered_summary: str
    status: str = "pending"  # pending -> approved | rejected | expired
    decided_by: str | None = None
    decided_at: int | None = None
    created_at: int = 0

    def to_dict(self) -> dict:
        return {
            "approval_id": self.approval_id,
            "incident_id": self.incident_id,
            "plan_id": self.plan_id,
            "diff": self.diff.to_dict(),
            "rendered_summary": self.rendered_summary,
            "status": self.status,
            "decided_by": self.decided_by,
            "decided_at": self.decided_at,
            "created_at": self.created_at,
        }


@dataclass
class RANState:
    running: bool
    boot_count: int
    active_config_version: int
    ue_contexts: set[str]

    def to_dict(self) -> dict:
        return {
            "running": self.running,
            "boot_count": self.boot_count,
            "active_config_version": self.active_config_version,
            "ue_contexts": sorted(self.ue_contexts),
        }


def load_path_table(path: str | Path | None = None) -> dict:
    p = Path(path) if path is not None else _DEFAULT_PATH_TABLE
    with open(p, encoding="utf-8") as fh:
        return json.load(fh)


def _path_rule(table: dict, path: str) -> dict:
    if path in table:
        return table[path]
    prefix = path.split(".", 1)[0] + ".*"
    if "." in path and prefix in table:
        return table[prefix]
    raise UnknownPath(path)


DEFAULT_SEED = {
    "version": 1,
    "security": {
        "ciphering_algorithms": ["nea0", "nea2"],
        "integrity_algorithms": ["nia0", "nia2"],
    },
    "cell": {"plmn": "00101", "cell_id": "0001"},
    "other_params": {"sib1_periodicity_ms": "160", "prach_preamble_max": "64"},
}


class RANSimulator:
    """Single-CU control-plane simulator with optimistic concurrency.

    Config mutations are serialized through one lock; readers get deep
    copies. The audit log is append-only and records every proposal,
    decision, apply, and reboot.
    """

    def __init__(self, seed: dict | None = None, path_table: dict | None = None,
                 approval_ttl_us: int | None = None):
        self._lock = threading.Lock()
        self._config = CUConfig.from_dict(copy.deepcopy(seed or DEFAULT_SEED))
        self._path_table = path_table or load_path_table()
        self._approvals: dict[str, ApprovalRequest] = {}
        self._approval_seq = 0
        self._audit: list[dict] = []
        self._state = RANState(
            running=True,
            boot_count=1,
            active_config_version=self._config.version,
            ue_contexts=set(),
        )
        self.approval_ttl_us = approval_ttl_us

    # -- reads ------------------------------------------------------------

    def get_ran_cu_config(self) -> CUConfig:
        with self._lock:
            return copy.deepcopy(self._config)

    def get_state(self) -> RANState:
        with self._lock:
            return RANState(
                running=self._state.running,
                boot_count=self._state.boot_count,
                active_config_version=self._state.active_config_version,
                ue_contexts=set(self._state.ue_contexts),
            )

    def attach_ue(self, ue_id: str) -> None:
        with self._lock:
            self._state.ue_contexts.add(ue_id)

    def get_approval(self, approval_id: str) -> ApprovalRequest:
        with self._lock:
            req = self._approvals.get(approval_id)
            if req is None:
                raise UnknownApprovalId(f"no approval {approval_id!r}")
            return copy.deepcopy(req)

    def list_approvals(self, status: str | None = None) -> list[ApprovalRequest]:
        with self._lock:
            reqs = sorted(self._approvals.values(), key=lambda r: r.approval_id)
            if status is not None:
                reqs = [r for r in reqs if r.status == status]
            return copy.deepcopy(reqs)

    def get_audit_log(self, kind: str | None = None,
                      incident_id: str | None = None) -> list[dict]:
        with self._lock:
            out = [e for e in self._audit
                   if (kind is None or e["kind"] == kind)
                   and (incident_id is None or e.get("incident_id") == incident_id)]
            return copy.deepcopy(out)

    def _audit_append(self, kind: str, **detail) -> None:
        self._audit.append({"ts": time.time_ns() // 1000, "kind": kind, **detail})

    # -- change application (internal) ------------------------------------

    def _apply_changes(self, config: CUConfig, changes: list[ConfigChange]) -> CUConfig:
        """Apply changes to a copy; raises on any invalid change."""
        new = copy.deepcopy(config)
        for ch in changes:
            if ch.op not in CHANGE_OPS:
                raise InvariantViolation(f"unknown change op {ch.op!r}")
            rule = _path_rule(self._path_table, ch.path)
            container, key = new._resolve(ch.path)
            current = container.get(key) if isinstance(container, dict) else getattr(container, key)
            if rule["type"] == "list":
                allowed = set(rule.get("allowed", []))
                if ch.op == "set":
                    if not isinstance(ch.value, list) or not set(ch.value) <= allowed:
                        raise InvariantViolation(f"bad list value for {ch.path}")
                    updated = [str(v) for v in ch.value]
                elif ch.op == "remove_list_item":
                    if ch.value not in current:
                        raise InvariantViolation(f"{ch.value!r} not present in {ch.path}")
                    updated = [v for v in current if v != ch.value]
                else:  # add_list_item
                    if ch.value not in allowed:
                        raise InvariantViolation(f"{ch.value!r} not allowed for {ch.path}")
                    updated = current if ch.value in current else current + [ch.value]
                if rule.get("non_empty") and not updated:
                    raise InvariantViolation(f"{ch.path} cannot be emptied")
            else:
                if ch.op != "set":
                    raise InvariantViolation(f"op {ch.op!r} invalid for scalar path {ch.path}")
                updated = str(ch.value)
            if isinstance(container, dict):
                container[key] = updated
            else:
                setattr(container, key, updated)
        return new

    def render_summary(self, changes: list[ConfigChange]) -> str:
        lines = []
        with self._lock:
            before = copy.deepcopy(self._config)
        after = self._apply_changes(before, changes)
        for ch in changes:
            lines.append(
                f"{ch.op} {ch.path}: {before.get_path(ch.path)!r} -> {after.get_path(ch.path)!r}"
                + (f" (value {ch.value!r})" if ch.op != "set" else "")
            )
        return "\n".join(lines)

    # -- approval-gated mutation ------------------------------------------

    def propose_update(self, plan_id: str, incident_id: str,
                       changes: list[ConfigChange | dict]) -> ApprovalRequest:
        changes = [
            ch if isinstance(ch, ConfigChange)
            else ConfigChange(str(ch["path"]), str(ch["op"]), ch.get("value"))
            for ch in changes
        ]
        if not changes:
            raise EmptyChangeSet("a proposal needs at least one change")
        with self._lock:
            base = copy.deepcopy(self._config)
            proposed = self._apply_changes(base, changes)  # validates, no commit
            summary_lines = [
                f"{ch.op} {ch.path}: {base.get_path(ch.path)!r} -> "
                f"{proposed.get_path(ch.path)!r}"
                for ch in changes
            ]
            self._approval_seq += 1
            req = ApprovalRequest(
                approval_id=f"APR-{self._approval_seq:04d}",
                incident_id=incident_id,
                plan_id=plan_id,
                diff=ConfigDiff(base_version=base.version, changes=changes),
                rendered_summary="\n".join(summary_lines),
                created_at=time.time_ns() // 1000,
            )
            self._approvals[req.approval_id] = req
            self._audit_append(
                "proposed",
                approval_id=req.approval_id,
                incident_id=incident_id,
                plan_id=plan_id,
                base_version=base.version,
                changes=[c.to_dict() for c in changes],
            )
            return copy.deepcopy(req)

    def decide(self, approval_id: str, decision: str, operator_id: str) -> ApprovalRequest:
        if decision not in {"approved", "rejected"}:
            raise ValueError(f"decision must be approved|rejected, got {decision!r}")
        with self._lock:
            req = self._approvals.get(approval_id)
            if req is None:
                raise UnknownApprovalId(f"no approval {approval_id!r}")
            self._expire_locked(req)
            if req.status != "pending":
                raise AlreadyDecided(f"approval {approval_id} already {req.status}")
            req.status = decision
            req.decided_by = operator_id
            req.decided_at = time.time_ns() // 1000
            self._audit_append(
                decision, approval_id=approval_id, incident_id=req.incident_id,
                operator_id=operator_id,
            )
            return copy.deepcopy(req)

    def _expire_locked(self, req: ApprovalRequest) -> None:
        if (
            self.approval_ttl_us is not None
            and req.status == "pending"
            and time.time_ns() // 1000 - req.created_at > self.approval_ttl_us
        ):
            req.status = "expired"
            self._audit_append("expired", approval_id=req.approval_id,
                               incident_id=req.incident_id)

    def apply_and_reboot(self, approval_id: str) -> RANState:
        with self._lock:
            req = self._approvals.get(approval_id)
            if req is None:
                raise UnknownApprovalId(f"no approval {approval_id!r}")
            if req.status != "approved":
                raise NotApproved(f"approval {approval_id} is {req.status}, not approved")
            if req.diff.base_version != self._config.version:
                raise VersionConflict(
                    f"config moved from v{req.diff.base_version} to v{self._config.version}"
                )
            # All-or-nothing: mutate a copy, commit only on full success.
            new = self._apply_changes(self._config, req.diff.changes)
            new.version = self._config.version + 1
            from_version = self._config.version
            self._config = new
            self._audit_append(
                "applied", approval_id=approval_id, incident_id=req.incident_id,
                from_version=from_version, to_version=new.version,
            )
            self._state.running = False
            self._state.boot_count += 1
            self._state.ue_contexts.clear()
            self._state.active_config_version = new.version
            self._state.running = True
            self._audit_append(
                "rebooted", approval_id=approval_id, incident_id=req.incident_id,
                boot_count=self._state.boot_count,
            )
            return self.get_state_locked()

    def get_state_locked(self) -> RANState:
        return RANState(
            running=self._state.running,
            boot_count=self._state.boot_count,
            active_config_version=self._state.active_config_version,
            ue_contexts=set(self._state.ue_contexts),
        )

    # -- persistence (CLI state directory) ---------------------------------

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "config": self._config.to_dict(),
                "approvals": [r.to_dict() for r in self._approvals.values()],
                "approval_seq": self._approval_seq,
                "audit": copy.deepcopy(self._audit),
                "state": self._state.to_dict(),
            }

    @classmethod
    def restore(cls, doc: dict, path_table: dict | None = None) -> "RANSimulator":
        sim = cls(seed=doc["config"], path_table=path_table)
        sim._approval_seq = int(doc.get("approval_seq", 0))
        for rd in doc.get("approvals", []):
            diff = ConfigDiff(
                base_version=int(rd["diff"]["base_version"]),
                changes=[
                    ConfigChange(c["path"], c["op"], c.get("value"))
                    for c in rd["diff"]["changes"]
                ],
            )
            sim._approvals[rd["approval_id"]] = ApprovalRequest(
                approval_id=rd["approval_id"],
                incident_id=rd["incident_id"],
                plan_id=rd["plan_id"],
                diff=diff,
                rendered_summary=rd["rendered_summary"],
                status=rd["status"],
                decided_by=rd.get("decided_by"),
                decided_at=rd.get("decided_at"),
                created_at=rd.get("created_at", 0),
            )
        sim._audit = list(doc.get("audit", []))
        st = doc.get("state", {})
        sim._state = RANState(
            running=bool(st.get("running", True)),
            boot_count=int(st.get("boot_count", 1)),
            active_config_version=int(st.get("active_config_version", sim._config.version)),
            ue_contexts=set(st.get("ue_contexts", [])),
        )
        return sim


@dataclass
class WorkflowResult:
    status: str  # completed | rejected | failed
    reason: str | None = None
    approval_id: str | None = None
    from_version: int | None = None
    to_version: int | None = None


class ConfigTuningWorkflow:
    """The hard-coded config tuning action workflow.

    Step order is fixed and owned by this class; plan content supplies only
    the change parameters. The workflow suspends between ``propose`` and
    ``finish``: the caller resumes it once a human decision exists.
    """

    def __init__(self, sim: RANSimulator):
        self.sim = sim
        self.executed_steps: list[str] = []

    def propose(self, plan_id: str, incident_id: str,
                changes: list[dict]) -> ApprovalRequest | WorkflowResult:
        self.executed_steps.append("fetch_config")
        self.sim.get_ran_cu_config()
        self.executed_steps.append("propose_update")
        try:
            return self.sim.propose_update(plan_id, incident_id, changes)
        except Exception as exc:
            return WorkflowResult(status="failed", reason=type(exc).__name__)

    def finish(self, approval_id: str) -> WorkflowResult:
        """Run the post-decision half: apply, reboot, verify."""
        req = self.sim.get_approval(approval_id)
        if req.status == "rejected":
            return WorkflowResult(status="rejected", approval_id=approval_id)
        if req.status != "approved":
            return WorkflowResult(status="failed", reason="NotApproved",
                                  approval_id=approval_id)
        self.executed_steps.append("apply_and_reboot")
        try:
            state = self.sim.apply_and_reboot(approval_id)
        except Exception as exc:
            return WorkflowResult(status="failed", reason=type(exc).__name__,
                                  approval_id=approval_id)
        self.executed_steps.append("verify")
        post = self.sim.get_ran_cu_config()
        # Verification: every proposed change must hold in the post-reboot config.
        for ch in req.diff.changes:
            actual = post.get_path(ch.path)
            if ch.op == "remove_list_item" and ch.value in (actual or []):
                return WorkflowResult(status="failed", reason="VerificationMismatch",
                                      approval_id=approval_id)
            if ch.op == "add_list_item" and ch.value not in (actual or []):
                return WorkflowResult(status="failed", reason="VerificationMismatch",
                                      approval_id=approval_id)
            if ch.op == "set" and actual != (
                [str(v) for v in ch.value] if isinstance(ch.value, list) else str(ch.value)
            ):
                return WorkflowResult(status="failed", reason="VerificationMismatch",
                                      approval_id=approval_id)
        self.executed_steps.append("record_completed")
        return WorkflowResult(
            status="completed",
            approval_id=approval_id,
            from_version=req.diff.base_version,
            to_version=state.active_config_version,
        )
