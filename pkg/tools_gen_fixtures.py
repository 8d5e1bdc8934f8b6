"""One-off generator for the fixture corpus, traces, scenarios, and scripts.

Run from the repo root: python tools_gen_fixtures.py
Ground-truth technique IDs other than FGT1600.501 are fixture-authored.
"""

import json
from pathlib import Path

FIX = Path("src/ranshield/fixtures")

CORPUS_VERSION = "fixture-2026.08"

T = []  # (id, name, description, tactics, mitigations)


def tech(tid, name, desc, tactics, mits):
    T.append({
        "technique_id": tid, "name": name, "description": desc,
        "tactic_ids": tactics,
        "mitigations": [{"mitigation_id": m[0], "name": m[1], "guidance": m[2]} for m in mits],
    })


tech("FGT1600.501", "Disabling Encryption Over Radio Interface",
     "A misconfigured or malicious base station negotiates the null ciphering algorithm nea0 "
     "and null integrity algorithm nia0 during the RRC security mode procedure, leaving user "
     "plane and signalling traffic over the radio interface unencrypted and unprotected. "
     "Adversaries exploit permissive CU security configurations that still advertise null "
     "algorithms in their allowed lists.",
     ["FGTA5009"],
     [("FGM5097", "Forbid null ciphering and integrity",
       "Remove nea0 and nia0 from the allowed ciphering and integrity algorithm lists in the "
       "CU security configuration and reboot the RAN so the hardened configuration takes effect."),
      ("FGM5046", "Monitor security mode negotiation",
       "Continuously audit SecurityModeCommand messages for selection of null algorithms and "
       "alert on any UE whose security context activates without confidentiality protection.")])

tech("FGT1466.501", "Downlink IMSI Extraction via Pre-Authentication Identity Request",
     "A man-in-the-middle adversary intercepts and modifies a pre-authentication downlink RRC "
     "or NAS message, injecting a plain-text Identity Request that forces the UE to reveal its "
     "permanent subscriber identity IMSI before any security context is established. The "
     "exposure happens in a timing window prior to authentication, so integrity protection "
     "cannot prevent it.",
     ["FGTA5019"],
     [("FGM5054", "Conceal subscriber identifiers",
       "Deploy SUCI concealment so the permanent IMSI is never sent in clear text, and rate "
       "limit identity procedures observed before authentication completes."),
      ("FGM5055", "Detect pre-authentication identity harvesting",
       "Alert on plain-text Identity Request messages arriving before the authentication "
       "procedure and correlate them with unexpected downlink message tampering.")])

tech("FGT1466.502", "Uplink IMSI Exposure Through Forced Identification",
     "An adversary operating a rogue cell coerces UEs into uplink identification procedures, "
     "harvesting permanent identities from uplink NAS Identity Response messages transmitted "
     "in clear text. Repeated forced registration attempts enlarge the capture window for "
     "subscriber identity collection.",
     ["FGTA5019"],
     [("FGM5054", "Conceal subscriber identifiers",
       "Deploy SUCI concealment so the permanent IMSI is never sent in clear text, and rate "
       "limit identity procedures observed before authentication completes.")])

tech("FGT1612.501", "Base Station Signalling Resource Depletion",
     "An attacker floods a base transceiver station with bursts of fabricated RRC setup "
     "requests from spoofed device identities, exhausting signalling channel resources and "
     "connection contexts at the BTS so that legitimate subscribers cannot attach.",
     ["FGTA5006"],
     [("FGM5021", "Rate limit random access signalling",
       "Tighten PRACH preamble budgets and per-identity RRC setup rate limits at the CU so "
       "signalling floods are shed before exhausting BTS connection resources.")])

tech("FGT1612.502", "Base Station Compute Exhaustion via Malformed Attach Storms",
     "Adversaries send storms of malformed registration and attach payloads that force the "
     "base station protocol stack through expensive decode and rejection paths, depleting "
     "processor capacity of the BTS and degrading scheduling for attached users.",
     ["FGTA5006"],
     [("FGM5022", "Harden decode paths and shed malformed load",
       "Enable early validation and drop of malformed attach payloads and cap reject "
       "processing so storms cannot starve the scheduler.")])

tech("FGT1612.503", "Base Station Paging Channel Saturation",
     "By triggering spurious paging for large batches of phantom subscribers an adversary "
     "saturates the paging channel of the BTS, delaying delivery of genuine paging messages "
     "and effectively denying mobile-terminated service.",
     ["FGTA5006"],
     [("FGM5023", "Bound paging load per source",
       "Apply per-source paging quotas and monitor paging occupancy so saturation attempts "
       "are throttled and alarmed.")])

tech("FGT5029.501", "Blind Radio Jamming of the Uplink Control Channel",
     "A blind denial of service adversary transmits wideband noise over the uplink control "
     "channel without decoding any protocol state, corrupting random access and scheduling "
     "requests so that devices in the cell cannot initiate or maintain connections.",
     ["FGTA5006"],
     [("FGM5031", "Adapt radio resource allocation under jamming",
       "Reconfigure random access resources and frequency hopping to move control signalling "
       "away from the jammed band while localizing the interference source.")])

tech("FGT5029.502", "Blind Downlink Synchronization Signal Jamming",
     "The adversary overpowers downlink synchronization and broadcast signals with targeted "
     "interference, blindly preventing nearby devices from acquiring the cell. No knowledge "
     "of subscriber state is required for this denial of service.",
     ["FGTA5006"],
     [("FGM5031", "Adapt radio resource allocation under jamming",
       "Reconfigure random access resources and frequency hopping to move control signalling "
       "away from the jammed band while localizing the interference source.")])

tech("FGT5029.503", "Blind Preamble Replay Denial of Service",
     "Captured random access preambles are blindly replayed at high volume, colliding with "
     "legitimate access attempts and causing persistent contention failures for devices "
     "trying to reach the cell.",
     ["FGTA5006"],
     [("FGM5021", "Rate limit random access signalling",
       "Tighten PRACH preamble budgets and per-identity RRC setup rate limits at the CU so "
       "signalling floods are shed before exhausting BTS connection resources.")])

tech("FGT5012.501", "Downlink Denial of Service via Spoofed Release Messages",
     "An adversary injects spoofed downlink RRC release and reject messages toward targeted "
     "subscribers, repeatedly tearing down their connections and denying downlink service "
     "while the network believes the UEs detached voluntarily.",
     ["FGTA5006"],
     [("FGM5033", "Integrity protect connection management messages",
       "Require integrity protection for release and reject messages where the standard "
       "permits and flag unprotected teardown sequences for investigation.")])

# distractor techniques
tech("FGT5010", "Rogue Base Station Impersonation",
     "An adversary deploys a false base station advertising a stronger signal than "
     "legitimate cells, luring UEs to camp on it and enabling downgrade, interception, or "
     "tracking of subscribers.",
     ["FGTA5009"],
     [("FGM5040", "Detect rogue cells",
       "Deploy network-based rogue cell detection comparing broadcast fingerprints against "
       "the authorized cell inventory.")])
tech("FGT5019", "SUCI Catcher Linkability Probing",
     "Attackers replay concealed subscriber identifiers and observe network responses to "
     "link encrypted SUCI values to targets, enabling presence testing without recovering "
     "the raw identity.",
     ["FGTA5019"],
     [("FGM5041", "Randomize concealment parameters",
       "Rotate concealment keys and enforce replay detection on identifier procedures.")])
tech("FGT5020", "NAS Replay of Captured Registration Messages",
     "Previously captured NAS registration messages are replayed to confuse mobility state "
     "or probe for acceptance of stale security contexts.",
     ["FGTA5012"],
     [("FGM5042", "Enforce NAS freshness",
       "Verify NAS sequence numbers strictly and discard replayed registration attempts.")])
tech("FGT5021", "Bidding Down to Legacy Radio Access",
     "The adversary manipulates capability negotiation to push a device onto legacy radio "
     "technologies with weaker protection, reopening known interception vectors.",
     ["FGTA5009"],
     [("FGM5043", "Pin minimum security capabilities",
       "Reject capability downgrades below policy and log bidding down attempts.")])
tech("FGT5022", "Malicious xApp Subscription Abuse",
     "A compromised near-real-time RIC xApp abuses E2 subscriptions to exfiltrate RAN state "
     "or issue unauthorized control toward the RAN nodes.",
     ["FGTA5030"],
     [("FGM5044", "Least privilege for RIC applications",
       "Scope E2 subscription rights per application and audit control message provenance.")])
tech("FGT5023", "E2 Interface Control Message Spoofing",
     "Forged E2 control messages are injected toward the RAN from an unauthorized source, "
     "altering scheduling or handover behaviour.",
     ["FGTA5030"],
     [("FGM5045", "Authenticate RIC interfaces",
       "Mutually authenticate E2 endpoints and drop control from unverified peers.")])
tech("FGT5024", "A1 Policy Tampering",
     "Adversaries modify A1 policy payloads in transit to steer non-real-time optimization "
     "toward degraded or unsafe network behaviour.",
     ["FGTA5030"],
     [("FGM5046a", "Sign orchestration policies",
       "Integrity protect A1 policies end to end and verify signatures before enactment.")])
tech("FGT5025", "Network Slice Resource Theft",
     "A tenant exceeds its slice service level by manipulating slice selection assistance "
     "information, starving other slices of guaranteed resources.",
     ["FGTA5031"],
     [("FGM5047", "Isolate slice quotas",
       "Enforce per-slice admission control and meter cross-slice resource consumption.")])
tech("FGT5026", "Paging Storm Amplification",
     "By triggering mobile-terminated events for many idle devices simultaneously, an "
     "attacker amplifies paging load across tracking areas disrupting idle mode operation.",
     ["FGTA5006"],
     [("FGM5023", "Bound paging load per source",
       "Apply per-source paging quotas and monitor paging occupancy so saturation attempts "
       "are throttled and alarmed.")])
tech("FGT5027", "Measurement Report Poisoning",
     "Falsified measurement reports from compromised devices bias handover decisions, "
     "concentrating load or pushing victims toward attacker-controlled cells.",
     ["FGTA5009"],
     [("FGM5048", "Sanity check mobility inputs",
       "Cross validate measurement reports against network side observations before acting.")])
tech("FGT5028", "GTP Tunnel Redirection",
     "Manipulated GTP tunnel endpoints redirect user plane traffic through adversary "
     "infrastructure for interception or modification.",
     ["FGTA5012"],
     [("FGM5049", "Validate tunnel endpoints",
       "Authorize GTP endpoint changes against topology and alert on unexpected rebinding.")])
tech("FGT5030", "SIB Spoofing for Emergency Broadcast Abuse",
     "Crafted system information blocks impersonate warning broadcasts or alter cell access "
     "parameters, causing mass device misbehaviour in the coverage area.",
     ["FGTA5009"],
     [("FGM5050", "Monitor broadcast integrity",
       "Fingerprint legitimate system information and alert on divergent broadcasts.")])
tech("FGT5031", "RRC Connection Reject Starvation",
     "Spoofed reject messages with large wait timers keep victim devices backing off "
     "indefinitely, a targeted starvation of service without radio jamming.",
     ["FGTA5006"],
     [("FGM5033", "Integrity protect connection management messages",
       "Require integrity protection for release and reject messages where the standard "
       "permits and flag unprotected teardown sequences for investigation.")])
tech("FGT5032", "Handover Hijack via Forged Context Transfer",
     "Forged inter-node context transfer messages hijack an ongoing handover, moving a "
     "victim session to an attacker-influenced node.",
     ["FGTA5012"],
     [("FGM5051", "Authenticate inter-node signalling",
       "Protect Xn and N2 context transfers with mutual authentication and audit trails.")])
tech("FGT5033", "Exposed Management Plane Credential Abuse",
     "Default or leaked credentials on RAN management interfaces let adversaries read or "
     "alter node configuration outside any orchestration workflow.",
     ["FGTA5032"],
     [("FGM5052", "Harden management access",
       "Rotate management credentials, require strong authentication, and restrict "
       "management plane reachability.")])
tech("FGT5034", "Telemetry Stream Suppression",
     "Attackers suppress or drop security telemetry from RAN nodes to blind detection "
     "applications while conducting other operations.",
     ["FGTA5032"],
     [("FGM5053", "Detect telemetry gaps",
       "Alarm on missing heartbeat and telemetry volume anomalies per node.")])
tech("FGT5035", "UE Capability Profiling",
     "Passive collection of unprotected capability exchanges profiles device models in an "
     "area, supporting targeted exploitation campaigns.",
     ["FGTA5019"],
     [("FGM5056", "Minimize pre-security disclosure",
       "Defer detailed capability exchange until after security activation where possible.")])
tech("FGT5036", "Registration Reject Tracking",
     "Selective registration rejects with distinctive causes let an adversary confirm the "
     "presence of specific subscribers in a tracking area.",
     ["FGTA5019"],
     [("FGM5055", "Detect pre-authentication identity harvesting",
       "Alert on plain-text Identity Request messages arriving before the authentication "
       "procedure and correlate them with unexpected downlink message tampering.")])
tech("FGT5037", "Malicious Configuration Drift Injection",
     "Small unauthorized configuration changes are accumulated over time across RAN nodes "
     "to weaken security posture without tripping change alarms.",
     ["FGTA5032"],
     [("FGM5057", "Continuous configuration attestation",
       "Diff running configurations against a signed baseline on every audit cycle.")])
tech("FGT5038", "Fronthaul Eavesdropping",
     "Unencrypted fronthaul links between distributed and radio units are tapped to "
     "reconstruct user traffic or inject frames.",
     ["FGTA5012"],
     [("FGM5058", "Encrypt fronthaul transport",
       "Apply link layer encryption and physical protection on fronthaul segments.")])
tech("FGT5039", "Core Signalling Storm via Compromised IoT Fleet",
     "A botnet of cellular IoT devices synchronizes registration and service requests to "
     "overload core signalling functions upstream of the RAN.",
     ["FGTA5006"],
     [("FGM5059", "Throttle device cohorts",
       "Apply cohort level signalling rate control and quarantine misbehaving fleets.")])
tech("FGT5040", "Emergency Call Spoofing",
     "Forged emergency service indications bypass access barring to seize prioritized "
     "resources or mask other attack traffic.",
     ["FGTA5031"],
     [("FGM5060", "Validate emergency indications",
       "Audit emergency access usage and correlate with location plausibility checks.")])

assert len(T) >= 30, len(T)
ids = [t["technique_id"] for t in T]
assert len(ids) == len(set(ids))

FIX.mkdir(parents=True, exist_ok=True)
(FIX / "corpus.json").write_text(
    json.dumps({"version": CORPUS_VERSION, "techniques": T}, indent=1) + "\n",
    encoding="utf-8",
)

# ---------------------------------------------------------------- seed config
seed = {
    "version": 1,
    "security": {
        "ciphering_algorithms": ["nea0", "nea2"],
        "integrity_algorithms": ["nia0", "nia2"],
    },
    "cell": {"plmn": "00101", "cell_id": "0001"},
    "other_params": {"sib1_periodicity_ms": "160", "prach_preamble_max": "64"},
}
(FIX / "seed_config.json").write_text(json.dumps(seed, indent=1) + "\n", "utf-8")

# ---------------------------------------------------------------- traces

def rec(ts, layer, direction, ue, msg, fields=None, raw_hex=None):
    d = {"ts": ts, "layer": layer, "direction": direction, "ue_id": ue,
         "message_name": msg, "fields": fields or {}}
    if raw_hex:
        d["raw_hex"] = raw_hex
    return json.dumps(d)


traces = {}

traces["Null-Cipher-Integrity"] = [
    rec(1000, "RRC", "UL", "ue-001", "RRCSetupRequest", {"establishmentCause": "mo-Data"}),
    rec(1200, "RRC", "DL", "ue-001", "RRCSetup"),
    rec(1400, "RRC", "UL", "ue-001", "RRCSetupComplete"),
    rec(2000, "NAS", "UL", "ue-001", "RegistrationRequest", {"identity": "suci-0-001-01"}),
    rec(3000, "RRC", "DL", "ue-001", "SecurityModeCommand",
        {"cipherAlgorithm": "nea0", "integrityProtAlgorithm": "nia0"}, "2200"),
    rec(3200, "RRC", "UL", "ue-001", "SecurityModeComplete", {}, "2a00"),
    rec(4000, "NAS", "DL", "ue-001", "RegistrationAccept"),
]

traces["Downlink-IMSI"] = [
    rec(1000, "RRC", "UL", "ue-002", "RRCSetupRequest", {"establishmentCause": "mo-Signalling"}),
    rec(1200, "RRC", "DL", "ue-002", "RRCSetup"),
    rec(1400, "RRC", "UL", "ue-002", "RRCSetupComplete"),
    rec(2000, "NAS", "DL", "ue-002", "IdentityRequest",
        {"identityType": "IMSI", "securityProtected": "false"}, "5b01"),
    rec(2200, "NAS", "UL", "ue-002", "IdentityResponse",
        {"identityType": "IMSI", "imsi": "001010000000002"}),
]

traces["Uplink-IMSI"] = [
    rec(1000, "RRC", "UL", "ue-003", "RRCSetupRequest"),
    rec(1500, "NAS", "UL", "ue-003", "IdentityResponse",
        {"identityType": "IMSI", "imsi": "001010000000003"}),
    rec(2500, "NAS", "DL", "ue-003", "RegistrationReject", {"cause": "illegal-UE"}),
    rec(3000, "RRC", "UL", "ue-003", "RRCSetupRequest"),
    rec(3500, "NAS", "UL", "ue-003", "IdentityResponse",
        {"identityType": "IMSI", "imsi": "001010000000003"}),
]

for i in range(1, 4):
    lines = []
    for n in range(12):
        lines.append(rec(1000 + n * 100, "RRC", "UL", f"spoof-{i}{n:02d}", "RRCSetupRequest",
                         {"establishmentCause": "mo-Data"}))
    lines.append(rec(2600, "RRC", "DL", "ue-010", "RRCReject", {"waitTime": "16"}))
    traces[f"BTS-Attack-{i}"] = lines

for i in range(1, 4):
    traces[f"Blind-DoS-{i}"] = [
        rec(1000, "RRC", "UL", "ue-020", "RRCSetupRequest"),
        rec(1900, "RRC", "UL", "ue-020", "RRCSetupRequest"),
        rec(2800, "RRC", "UL", "ue-020", "RRCSetupRequest"),
        rec(4000, "RRC", "DL", "ue-020", "RRCReject", {"waitTime": "8"}),
    ]

traces["Downlink-DoS"] = [
    rec(1000, "RRC", "UL", "ue-030", "RRCSetupRequest"),
    rec(1200, "RRC", "DL", "ue-030", "RRCSetup"),
    rec(1400, "RRC", "UL", "ue-030", "RRCSetupComplete"),
    rec(2000, "RRC", "DL", "ue-030", "RRCRelease", {"securityProtected": "false"}),
    rec(2600, "RRC", "UL", "ue-030", "RRCSetupRequest"),
    rec(2800, "RRC", "DL", "ue-030", "RRCRelease", {"securityProtected": "false"}),
]

traces["benign-fault"] = [
    rec(1000, "RRC", "UL", "ue-040", "RRCSetupRequest"),
    rec(1200, "RRC", "DL", "ue-040", "RRCSetup"),
    rec(1400, "RRC", "UL", "ue-040", "RRCSetupComplete"),
    rec(2000, "NAS", "UL", "ue-040", "RegistrationRequest"),
    rec(2500, "NAS", "DL", "ue-040", "RegistrationReject", {"cause": "congestion"}),
]

(FIX / "traces").mkdir(exist_ok=True)
for sid, lines in traces.items():
    (FIX / "traces" / f"{sid}.jsonl").write_text("\n".join(lines) + "\n", "utf-8")

# ---------------------------------------------------------------- scenarios + scripts

corpus_by_id = {t["technique_id"]: t for t in T}


def summary_for(gt_id, extra=""):
    t = corpus_by_id[gt_id]
    return (t["name"] + ". " + t["description"] + (" " + extra if extra else "")).strip()


MITIGATED_PLAN_NULL_CIPHER = {
    "plan": {"steps": [
        {"tool_name": "get_ran_cu_config", "params": {},
         "rationale": "Read the committed CU security configuration"},
        {"tool_name": "update_ran_cu_config", "params": {"changes": [
            {"path": "security.ciphering_algorithms", "op": "remove_list_item", "value": "nea0"},
            {"path": "security.integrity_algorithms", "op": "remove_list_item", "value": "nia0"},
        ]}, "rationale": "Remove the insecure null algorithms from the allowed lists"},
        {"tool_name": "reboot_ran", "params": {},
         "rationale": "Reboot so the hardened configuration takes effect"},
    ]}
}

MITIGATED_PLAN_BLIND_DOS = {
    "plan": {"steps": [
        {"tool_name": "get_ran_cu_config", "params": {},
         "rationale": "Read the committed CU configuration"},
        {"tool_name": "update_ran_cu_config", "params": {"changes": [
            {"path": "other_params.prach_preamble_max", "op": "set", "value": "32"},
        ]}, "rationale": "Shrink the random access preamble budget under jamming"},
        {"tool_name": "reboot_ran", "params": {},
         "rationale": "Reboot so the new random access budget takes effect"},
    ]}
}

SCENARIOS = [
    # (scenario_id, gt ids, ue, risk, terminal, plan_final_or_none)
    ("BTS-Attack-1", ["FGT1612.501"], "spoof-100", "high", "escalated", None),
    ("BTS-Attack-2", ["FGT1612.502"], "spoof-200", "high", "escalated", None),
    ("BTS-Attack-3", ["FGT1612.503"], "spoof-300", "high", "escalated", None),
    ("Blind-DoS-1", ["FGT5029.501"], "ue-020", "high", "mitigated", MITIGATED_PLAN_BLIND_DOS),
    ("Blind-DoS-2", ["FGT5029.502"], "ue-020", "high", "escalated", None),
    ("Blind-DoS-3", ["FGT5029.503"], "ue-020", "medium", "escalated", None),
    ("Downlink-DoS", ["FGT5012.501"], "ue-030", "medium", "escalated", None),
    ("Downlink-IMSI", ["FGT1466.501"], "ue-002", "high", "escalated", None),
    ("Null-Cipher-Integrity", ["FGT1600.501"], "ue-001", "high", "mitigated",
     MITIGATED_PLAN_NULL_CIPHER),
    ("Uplink-IMSI", ["FGT1466.502"], "ue-003", "medium", "escalated", None),
]

(FIX / "scenarios").mkdir(exist_ok=True)
(FIX / "scripts").mkdir(exist_ok=True)

for sid, gts, ue, risk, terminal, plan in SCENARIOS:
    gt = gts[0]
    report_summary = summary_for(gt)
    script = {}
    # analysis: inspect traffic, check the UE, report a threat
    script[f"{sid}/analysis/1"] = json.dumps({
        "thought": "Inspect the trace referenced by the alert",
        "action": "get_traffic",
        "action_input": {"trace_id": sid, "ts_from": 0, "ts_to": 10_000_000},
    })
    script[f"{sid}/analysis/2"] = json.dumps({
        "thought": "Check the security context of the implicated UE",
        "action": "get_ue_description",
        "action_input": {"ue_id": ue},
    })
    script[f"{sid}/analysis/3"] = json.dumps({
        "thought": "Evidence confirms a genuine threat",
        "final": {
            "verdict": "threat",
            "event_summary": report_summary,
            "affected_components": ["O-CU", f"UE:{ue}"],
            "risk": risk,
            "evidence_refs": [{"trace_id": sid, "ts_from": 0, "ts_to": 10_000_000}],
        },
    })
    # classification: fetch mitigations for the best candidate, then select it
    script[f"{sid}/classification/1"] = json.dumps({
        "thought": "Fetch mitigation guidance for the top retrieved technique",
        "action": "get_mitigations",
        "action_input": {"technique_id": gt},
    })
    script[f"{sid}/classification/2"] = json.dumps({
        "thought": "The top candidate matches the observed behaviour",
        "final": {"selected_technique_ids": gts},
    })
    # response
    if plan is not None:
        script[f"{sid}/response/1"] = json.dumps({
            "thought": "Confirm the UE security context before drafting changes",
            "action": "get_ue_description",
            "action_input": {"ue_id": ue},
        })
        script[f"{sid}/response/2"] = json.dumps({
            "thought": "A config tuning plan covers the mitigation", "final": plan,
        })
        expected_tools = sorted({
            "get_traffic", "get_ue_description", "get_mitigations",
            "get_ran_cu_config", "update_ran_cu_config", "reboot_ran",
        })
    else:
        script[f"{sid}/response/1"] = json.dumps({
            "thought": "No safe control API can address this mitigation",
            "final": {"no_plan": True},
        })
        expected_tools = sorted({"get_traffic", "get_ue_description", "get_mitigations"})

    (FIX / "scripts" / f"{sid}.json").write_text(json.dumps(script, indent=1) + "\n", "utf-8")
    manifest = {
        "scenario_id": sid,
        "description": f"Scripted replay of the {sid} threat scenario.",
        "trace_path": f"traces/{sid}.jsonl",
        "ground_truth_technique_ids": gts,
        "expected_tool_set": expected_tools,
        "expected_terminal": terminal,
        "script_path": f"scripts/{sid}.json",
        "event": {
            "source": "xapp",
            "description": report_summary,
            "severity_hint": risk,
            "telemetry_ref": sid,
            "affected_ue_ids": [ue],
        },
    }
    (FIX / "scenarios" / f"{sid}.json").write_text(json.dumps(manifest, indent=1) + "\n", "utf-8")

# benign fixture script (used by tests, not part of the 10-scenario suite)
benign = {
    "benign-fault/analysis/1": json.dumps({
        "thought": "Inspect the trace referenced by the alert",
        "action": "get_traffic",
        "action_input": {"trace_id": "benign-fault", "ts_from": 0, "ts_to": 10_000_000},
    }),
    "benign-fault/analysis/2": json.dumps({
        "thought": "Registration rejected with cause congestion; this is load, not attack",
        "final": {
            "verdict": "benign",
            "event_summary": "Registration failure caused by congestion",
            "affected_components": [],
            "risk": "low",
        },
    }),
}
(FIX / "scripts" / "benign-fault.json").write_text(json.dumps(benign, indent=1) + "\n", "utf-8")

print("fixtures written:", len(T), "techniques,", len(traces), "traces,", len(SCENARIOS), "scenarios")
