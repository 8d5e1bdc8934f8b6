"""Curated RRC/NAS trace store and the network-data query surface.

Traces are JSON-Lines files, one decoded message per line. Ingestion is
skip-and-count on malformed lines: curated logs are dirty and triage has to
proceed anyway. A trace becomes visible to readers only once fully
committed.
"""

from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Iterable

from .errors import (
    AllRecordsRejected,
    DuplicateTraceId,
    InvalidWindow,
    UnknownTraceId,
    UnknownUeId,
)

LAYERS = {"RRC", "NAS"}
DIRECTIONS = {"UL", "DL"}
KNOWN_ALGOS = {f"nea{i}" for i in range(4)} | {f"nia{i}" for i in range(4)} | {"unknown"}

_HEX_RE = re.compile(r"^(?:[0-9a-fA-F]{2})*$")


@dataclass(frozen=True)
class TelemetryRecord:
    ts: int
    layer: str
    direction: str
    ue_id: str
    message_name: str
    fields: dict[str, str]
    raw_hex: str | None = None

    def to_dict(self) -> dict:
        d = {
            "ts": self.ts,
            "layer": self.layer,
            "direction": self.direction,
            "ue_id": self.ue_id,
            "message_name": self.message_name,
            "fields": dict(self.fields),
        }
        if self.raw_hex is not None:
            d["raw_hex"] = self.raw_hex
        return d


@dataclass(frozen=True)
class IngestSummary:
    trace_id: str
    count: int
    rejected_count: int
    first_ts: int | None
    last_ts: int | None


@dataclass
class ThreatEvent:
    event_id: str
    received_at: int
    source: str
    description: str
    severity_hint: str | None = None
    telemetry_ref: str | None = None
    affected_ue_ids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "received_at": self.received_at,
            "source": self.source,
            "description": self.description,
            "severity_hint": self.severity_hint,
            "telemetry_ref": self.telemetry_ref,
            "affected_ue_ids": list(self.affected_ue_ids),
        }


@dataclass
class UEDescription:
    ue_id: str
    rrc_state: str
    ciphering_alg: str
    integrity_alg: str
    activated: bool
    last_seen_ts: int

    def to_dict(self) -> dict:
        return {
            "ue_id": self.ue_id,
            "rrc_state": self.rrc_state,
            "security_context": {
                "ciphering_alg": self.ciphering_alg,
                "integrity_alg": self.integrity_alg,
                "activated": self.activated,
            },
            "last_seen_ts": self.last_seen_ts,
        }


def _parse_record(line: str) -> TelemetryRecord | None:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        return None
    if not isinstance(obj, dict):
        return None
    ts = obj.get("ts")
    layer = obj.get("layer")
    direction = obj.get("direction")
    ue_id = obj.get("ue_id")
    message_name = obj.get("message_name")
    fields = obj.get("fields", {})
    raw_hex = obj.get("raw_hex")
    if not isinstance(ts, int) or ts < 0:
        return None
    if layer not in LAYERS or direction not in DIRECTIONS:
        return None
    if not isinstance(ue_id, str) or not isinstance(message_name, str) or not message_name:
        return None
    if not isinstance(fields, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in fields.items()
    ):
        return None
    if raw_hex is not None:
        if not isinstance(raw_hex, str) or not _HEX_RE.match(raw_hex):
            return None
    return TelemetryRecord(ts, layer, direction, ue_id, message_name, dict(fields), raw_hex)


class TelemetryStore:
    """In-memory store for traces, events, and derived UE security state."""

    def __init__(self) -> None:
        self._traces: dict[str, list[TelemetryRecord]] = {}
        self._events: list[ThreatEvent] = []
        self._ue_state: dict[str, UEDescription] = {}
        self._event_seq = 0
        self._write_lock = threading.Lock()

    # -- ingestion --------------------------------------------------------

    def ingest_trace(self, trace_id: str, lines: Iterable[str]) -> IngestSummary:
        with self._write_lock:
            if trace_id in self._traces:
                raise DuplicateTraceId(f"trace {trace_id!r} already ingested")
            records: list[TelemetryRecord] = []
            rejected = 0
            for line in lines:
                if not line.strip():
                    continue
                rec = _parse_record(line)
                if rec is None:
                    rejected += 1
                else:
                    records.append(rec)
            if not records:
                raise AllRecordsRejected(
                    f"trace {trace_id!r}: no usable records ({rejected} rejected)"
                )
            records.sort(key=lambda r: r.ts)  # stable: ties keep input order
            # Commit is atomic: readers only ever see the full trace.
            self._traces[trace_id] = records
            self._derive_ue_state(records)
            return IngestSummary(
                trace_id=trace_id,
                count=len(records),
                rejected_count=rejected,
                first_ts=records[0].ts,
                last_ts=records[-1].ts,
            )

    def _derive_ue_state(self, records: list[TelemetryRecord]) -> None:
        # activated flips true at the first SecurityModeComplete after a
        # SecurityModeCommand; algorithms come from that command's fields.
        pending_cmd: dict[str, TelemetryRecord] = {}
        for rec in records:
            state = self._ue_state.get(rec.ue_id)
            if state is None:
                state = UEDescription(
                    ue_id=rec.ue_id,
                    rrc_state="unknown",
                    ciphering_alg="unknown",
                    integrity_alg="unknown",
                    activated=False,
                    last_seen_ts=rec.ts,
                )
                self._ue_state[rec.ue_id] = state
            state.last_seen_ts = max(state.last_seen_ts, rec.ts)
            if rec.layer == "RRC":
                if rec.message_name == "RRCSetupRequest":
                    state.rrc_state = "RRC_SETUP_REQUESTED"
                elif rec.message_name in ("RRCSetupComplete", "RRCSetup"):
                    state.rrc_state = "RRC_CONNECTED"
                elif rec.message_name == "RRCRelease":
                    state.rrc_state = "RRC_IDLE"
                if rec.message_name == "SecurityModeCommand":
                    pending_cmd[rec.ue_id] = rec
                elif rec.message_name == "SecurityModeComplete":
                    cmd = pending_cmd.pop(rec.ue_id, None)
                    if cmd is not None:
                        ciph = cmd.fields.get("cipherAlgorithm", "unknown")
                        integ = cmd.fields.get("integrityProtAlgorithm", "unknown")
                        state.ciphering_alg = ciph if ciph in KNOWN_ALGOS else "unknown"
                        state.integrity_alg = integ if integ in KNOWN_ALGOS else "unknown"
                        state.activated = True

    def reset(self) -> None:
        with self._write_lock:
            self._traces.clear()
            self._events.clear()
            self._ue_state.clear()
            self._event_seq = 0

    # -- queries ----------------------------------------------------------

    def has_trace(self, trace_id: str) -> bool:
        return trace_id in self._traces

    def get_traffic(
        self,
        trace_id: str,
        ts_from: int,
        ts_to: int,
        layer: str | None = None,
        direction: str | None = None,
        ue_id: str | None = None,
    ) -> list[TelemetryRecord]:
        if trace_id not in self._traces:
            raise UnknownTraceId(f"trace {trace_id!r} not ingested")
        if ts_from > ts_to:
            raise InvalidWindow(f"ts_from {ts_from} > ts_to {ts_to}")
        out = []
        for rec in self._traces[trace_id]:
            if rec.ts < ts_from or rec.ts > ts_to:
                continue
            if layer is not None and rec.layer != layer:
                continue
            if direction is not None and rec.direction != direction:
                continue
            if ue_id is not None and rec.ue_id != ue_id:
                continue
            out.append(rec)
        return out

    def add_event(
        self,
        source: str,
        description: str,
        severity_hint: str | None = None,
        telemetry_ref: str | None = None,
        affected_ue_ids: list[str] | None = None,
        received_at: int | None = None,
    ) -> ThreatEvent:
        if not description:
            raise ValueError("event description must be non-empty")
        if source not in {"xapp", "rapp", "monitor", "operator"}:
            raise ValueError(f"bad event source {source!r}")
        with self._write_lock:
            self._event_seq += 1
            event = ThreatEvent(
                event_id=f"EVT-{self._event_seq:04d}",
                received_at=received_at if received_at is not None else time.time_ns() // 1000,
                source=source,
                description=description,
                severity_hint=severity_hint,
                telemetry_ref=telemetry_ref,
                affected_ue_ids=list(affected_ue_ids or []),
            )
            self._events.append(event)
            return event

    def get_network_events(self, since: int = 0) -> list[ThreatEvent]:
        return sorted(
            (e for e in self._events if e.received_at >= since),
            key=lambda e: e.received_at,
        )

    def get_ue_description(self, ue_id: str) -> UEDescription:
        try:
            return self._ue_state[ue_id]
        except KeyError:
            raise UnknownUeId(f"no telemetry seen for UE {ue_id!r}") from None
