import time

import pytest
from fastapi.testclient import TestClient

from ranshield.service import create_app


def _wait_phase(client, incident_id, phases, timeout=5.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        doc = client.get(f"/incidents/{incident_id}").json()
        if doc["phase"] in phases:
            return doc
        time.sleep(0.02)
    raise AssertionError(f"incident never reached {phases}: {doc['phase']}")


@pytest.fixture()
def client():
    app = create_app({})
    with TestClient(app) as c:
        yield c


class TestKbEndpoints:
    def test_search_returns_ranked_results(self, client):
        r = client.get("/kb/search", params={
            "q": "disabling encryption over radio interface", "k": 3})
        assert r.status_code == 200
        body = r.json()
        assert body[0]["technique_id"] == "FGT1600.501"
        assert body[0]["rank"] == 1
        assert len(body) == 3

    def test_get_technique(self, client):
        r = client.get("/kb/techniques/FGT1600.501")
        assert r.status_code == 200
        doc = r.json()
        assert doc["name"] == "Disabling Encryption Over Radio Interface"
        assert {m["mitigation_id"] for m in doc["mitigations"]} == {
            "FGM5097", "FGM5046"}

    def test_unknown_technique_is_404(self, client):
        r = client.get("/kb/techniques/FGT0000")
        assert r.status_code == 404
        assert r.json()["code"] == "UNKNOWN_TECHNIQUE"

    def test_search_k_bounds(self, client):
        assert client.get("/kb/search", params={"q": "x", "k": 0}).status_code == 422


class TestIncidentFlow:
    def _post_null_cipher(self, client):
        r = client.post("/incidents", json={
            "source": "xapp",
            "description": "null cipher alert",
            "telemetry_ref": "Null-Cipher-Integrity",
            "scenario_id": "Null-Cipher-Integrity",
        })
        assert r.status_code == 202
        return r.json()["incident_id"]

    def test_full_approval_round_trip(self, client):
        incident_id = self._post_null_cipher(client)
        assert incident_id
        doc = _wait_phase(client, incident_id, {"awaiting_approval"})
        assert doc["plan"] is not None

        approvals = client.get("/approvals", params={
            "status": "pending", "wait": 2000}).json()
        assert len(approvals) == 1
        approval_id = approvals[0]["approval_id"]

        r = client.post(f"/approvals/{approval_id}/decision",
                        json={"decision": "approve"},
                        headers={"X-Operator-Id": "alice"})
        assert r.status_code == 200
        assert r.json()["status"] == "approved"
        assert r.json()["decided_by"] == "alice"

        doc = _wait_phase(client, incident_id, {"mitigated"})
        assert doc["phase"] == "mitigated"

        kinds = [e["kind"] for e in client.get("/audit").json()]
        assert kinds == ["proposed", "approved", "applied", "rebooted"]

    def test_rejection_leads_to_failed_and_no_mutation(self, client):
        incident_id = self._post_null_cipher(client)
        _wait_phase(client, incident_id, {"awaiting_approval"})
        approval_id = client.get("/approvals", params={
            "status": "pending", "wait": 2000}).json()[0]["approval_id"]
        r = client.post(f"/approvals/{approval_id}/decision",
                        json={"decision": "reject"},
                        headers={"X-Operator-Id": "bob"})
        assert r.status_code == 200
        doc = _wait_phase(client, incident_id, {"failed"})
        assert doc["phase"] == "failed"
        kinds = [e["kind"] for e in client.get("/audit").json()]
        assert kinds == ["proposed", "rejected"]

    def test_second_decision_conflicts(self, client):
        incident_id = self._post_null_cipher(client)
        _wait_phase(client, incident_id, {"awaiting_approval"})
        approval_id = client.get("/approvals", params={
            "status": "pending", "wait": 2000}).json()[0]["approval_id"]
        headers = {"X-Operator-Id": "alice"}
        assert client.post(f"/approvals/{approval_id}/decision",
                           json={"decision": "approve"},
                           headers=headers).status_code == 200
        r = client.post(f"/approvals/{approval_id}/decision",
                        json={"decision": "reject"}, headers=headers)
        assert r.status_code == 409
        assert r.json()["code"] == "ALREADY_DECIDED"

    def test_escalated_incident_needs_no_approval(self, client):
        r = client.post("/incidents", json={
            "source": "xapp",
            "description": "downlink imsi capture",
            "telemetry_ref": "Downlink-IMSI",
            "scenario_id": "Downlink-IMSI",
        })
        incident_id = r.json()["incident_id"]
        doc = _wait_phase(client, incident_id, {"escalated"})
        assert doc["recommendation"]["reason"] == "no_viable_plan"
        assert client.get("/approvals").json() == []
        assert client.get("/audit").json() == []

    def test_incident_listing(self, client):
        incident_id = self._post_null_cipher(client)
        _wait_phase(client, incident_id, {"awaiting_approval"})
        listing = client.get("/incidents").json()
        assert [i["incident_id"] for i in listing] == [incident_id]
        assert listing[0]["phase"] == "awaiting_approval"


class TestDecisionContract:
    def _pending_approval(self, client):
        r = client.post("/incidents", json={
            "source": "xapp", "description": "null cipher",
            "telemetry_ref": "Null-Cipher-Integrity",
            "scenario_id": "Null-Cipher-Integrity"})
        _wait_phase(client, r.json()["incident_id"], {"awaiting_approval"})
        return client.get("/approvals").json()[0]["approval_id"]

    def test_missing_operator_header_is_rejected(self, client):
        approval_id = self._pending_approval(client)
        r = client.post(f"/approvals/{approval_id}/decision",
                        json={"decision": "approve"})
        assert r.status_code == 400
        assert r.json()["code"] == "BAD_REQUEST"

    def test_bad_decision_verb(self, client):
        approval_id = self._pending_approval(client)
        r = client.post(f"/approvals/{approval_id}/decision",
                        json={"decision": "maybe"},
                        headers={"X-Operator-Id": "alice"})
        assert r.status_code == 400

    def test_unknown_approval_is_404(self, client):
        r = client.post("/approvals/APR-9999/decision",
                        json={"decision": "approve"},
                        headers={"X-Operator-Id": "alice"})
        assert r.status_code == 404
        assert r.json()["code"] == "UNKNOWN_APPROVAL"

    def test_unknown_incident_is_404(self, client):
        r = client.get("/incidents/INC-9999")
        assert r.status_code == 404
        assert r.json()["code"] == "UNKNOWN_INCIDENT"


class TestLongPoll:
    def test_wait_returns_early_when_approval_appears(self, client):
        import threading

        def post_later():
            time.sleep(0.2)
            client.post("/incidents", json={
                "source": "xapp", "description": "null cipher",
                "telemetry_ref": "Null-Cipher-Integrity",
                "scenario_id": "Null-Cipher-Integrity"})

        t = threading.Thread(target=post_later)
        t.start()
        start = time.monotonic()
        approvals = client.get("/approvals", params={
            "status": "pending", "wait": 10000}).json()
        elapsed = time.monotonic() - start
        t.join()
        assert len(approvals) == 1
        assert elapsed < 9.0

    def test_zero_wait_returns_immediately(self, client):
        start = time.monotonic()
        assert client.get("/approvals", params={"wait": 0}).json() == []
        assert time.monotonic() - start < 1.0
