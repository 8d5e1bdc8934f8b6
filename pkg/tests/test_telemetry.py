import json

import pytest

from ranshield.errors import (
    AllRecordsRejected,
    DuplicateTraceId,
    InvalidWindow,
    UnknownTraceId,
    UnknownUeId,
)
from ranshield.evalkit import FIXTURES_DIR
from ranshield.telemetry import TelemetryStore


def _line(ts=1000, layer="RRC", direction="UL", ue="ue-1", msg="RRCSetupRequest",
          fields=None, **extra):
    d = {"ts": ts, "layer": layer, "direction": direction, "ue_id": ue,
         "message_name": msg, "fields": fields or {}, **extra}
    return json.dumps(d)


@pytest.fixture
def store():
    return TelemetryStore()


@pytest.fixture
def null_cipher_store():
    s = TelemetryStore()
    with open(FIXTURES_DIR / "traces" / "Null-Cipher-Integrity.jsonl") as fh:
        s.ingest_trace("nc", fh)
    return s


class TestIngest:
    def test_null_cipher_fixture_queryable(self, null_cipher_store):
        recs = null_cipher_store.get_traffic("nc", 0, 10_000_000)
        cmds = [r for r in recs if r.message_name == "SecurityModeCommand"]
        assert cmds and cmds[0].fields["cipherAlgorithm"] == "nea0"
        assert cmds[0].fields["integrityProtAlgorithm"] == "nia0"

    def test_empty_stream_rejected(self, store):
        with pytest.raises(AllRecordsRejected):
            store.ingest_trace("t", [])

    def test_unknown_layer_skipped_and_counted(self, store):
        summary = store.ingest_trace("t", [_line(), _line(layer="MAC")])
        assert summary.count == 1
        assert summary.rejected_count == 1

    def test_duplicate_trace_id(self, store):
        store.ingest_trace("t", [_line()])
        with pytest.raises(DuplicateTraceId):
            store.ingest_trace("t", [_line()])

    def test_records_sorted_by_ts(self, store):
        store.ingest_trace("t", [_line(ts=500), _line(ts=100), _line(ts=300)])
        recs = store.get_traffic("t", 0, 1000)
        assert [r.ts for r in recs] == [100, 300, 500]

    def test_odd_length_hex_rejected(self, store):
        summary = store.ingest_trace("t", [_line(), _line(raw_hex="abc")])
        assert summary.rejected_count == 1

    def test_malformed_json_skipped(self, store):
        summary = store.ingest_trace("t", ["{not json", _line()])
        assert summary.count == 1 and summary.rejected_count == 1


class TestGetTraffic:
    def test_full_window_no_filter_returns_all(self, null_cipher_store):
        recs = null_cipher_store.get_traffic("nc", 0, 10_000_000)
        assert len(recs) == 7

    def test_inverted_window(self, null_cipher_store):
        with pytest.raises(InvalidWindow):
            null_cipher_store.get_traffic("nc", 100, 99)

    def test_unknown_trace(self, store):
        with pytest.raises(UnknownTraceId):
            store.get_traffic("missing", 0, 1)

    def test_downlink_imsi_filter_finds_identity_request(self):
        s = TelemetryStore()
        with open(FIXTURES_DIR / "traces" / "Downlink-IMSI.jsonl") as fh:
            s.ingest_trace("dl", fh)
        recs = s.get_traffic("dl", 0, 10_000_000, layer="NAS", direction="DL")
        assert any(r.message_name == "IdentityRequest" for r in recs)

    def test_filter_matches_naive_full_scan(self, null_cipher_store):
        got = null_cipher_store.get_traffic("nc", 1400, 3200, layer="RRC", direction="UL")
        naive = [
            r for r in null_cipher_store.get_traffic("nc", 0, 10_000_000)
            if 1400 <= r.ts <= 3200 and r.layer == "RRC" and r.direction == "UL"
        ]
        assert got == naive

    def test_repeat_query_identical(self, null_cipher_store):
        a = null_cipher_store.get_traffic("nc", 0, 5000, ue_id="ue-001")
        b = null_cipher_store.get_traffic("nc", 0, 5000, ue_id="ue-001")
        assert a == b


class TestUeState:
    def test_null_cipher_security_context(self, null_cipher_store):
        ue = null_cipher_store.get_ue_description("ue-001")
        assert ue.ciphering_alg == "nea0"
        assert ue.integrity_alg == "nia0"
        assert ue.activated is True

    def test_unknown_ue(self, store):
        store.ingest_trace("t", [_line()])
        with pytest.raises(UnknownUeId):
            store.get_ue_description("ghost")

    def test_no_security_messages_means_unknown_algs(self, store):
        store.ingest_trace("t", [_line(ue="ue-9")])
        ue = store.get_ue_description("ue-9")
        assert (ue.ciphering_alg, ue.integrity_alg, ue.activated) == ("unknown", "unknown", False)

    def test_reingest_after_reset_is_idempotent(self):
        lines = open(FIXTURES_DIR / "traces" / "Null-Cipher-Integrity.jsonl").read().splitlines()
        s = TelemetryStore()
        s.ingest_trace("a", lines)
        first = s.get_ue_description("ue-001").to_dict()
        s.reset()
        s.ingest_trace("b", lines)
        assert s.get_ue_description("ue-001").to_dict() == first


class TestEvents:
    def test_events_ordered_and_since_filtered(self, store):
        store.add_event("xapp", "one", received_at=100)
        store.add_event("monitor", "two", received_at=50)
        evs = store.get_network_events(0)
        assert [e.description for e in evs] == ["two", "one"]
        assert store.get_network_events(since=101) == []

    def test_event_ids_unique(self, store):
        a = store.add_event("xapp", "x")
        b = store.add_event("xapp", "y")
        assert a.event_id != b.event_id

    def test_empty_description_rejected(self, store):
        with pytest.raises(ValueError):
            store.add_event("xapp", "")
