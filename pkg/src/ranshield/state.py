"""On-disk state directory shared by CLI invocations.

`scenario run` can park an incident at the approval gate and exit; a later
`approvals decide` call reloads this state, applies the decision, and drives
the parked incident to its terminal phase. The directory holds one JSON
document plus any ingested trace copies and a persisted index.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np

from .kb import Corpus, LexicalEmbedder, VectorIndex, load_stopwords
from .ran import ConfigTuningWorkflow, RANSimulator

STATE_FILE = "state.json"
INDEX_FILE = "index.npz"
INDEX_META_FILE = "index_meta.json"


class StateStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    # -- simulator + incidents --------------------------------------------

    def save(self, sim: RANSimulator, incidents: list[dict]) -> None:
        doc = {"sim": sim.snapshot(), "incidents": incidents}
        (self.root / STATE_FILE).write_text(
            json.dumps(doc, indent=1, sort_keys=True, default=str), encoding="utf-8"
        )

    def load(self) -> tuple[RANSimulator, list[dict]]:
        p = self.root / STATE_FILE
        if not p.exists():
            return RANSimulator(), []
        doc = json.loads(p.read_text(encoding="utf-8"))
        return RANSimulator.restore(doc["sim"]), list(doc.get("incidents", []))

    def apply_decision(self, approval_id: str, decision: str, operator_id: str) -> dict:
        """Decide a pending approval and finish any incident parked on it."""
        sim, incidents = self.load()
        sim.decide(approval_id, decision, operator_id)
        outcome = {"approval_id": approval_id, "decision": decision}
        for inc in incidents:
            if inc.get("approval_id") != approval_id or inc.get("phase") != "awaiting_approval":
                continue
            if decision == "rejected":
                if inc.get("plan"):
                    inc["plan"]["status"] = "rejected"
                _transition(inc, "failed", "approval rejected")
            else:
                _transition(inc, "executing", approval_id)
                wf = ConfigTuningWorkflow(sim)
                result = wf.finish(approval_id)
                if result.status == "completed":
                    if inc.get("plan"):
                        inc["plan"]["status"] = "completed"
                    _transition(inc, "mitigated", f"config v{result.to_version}")
                else:
                    if inc.get("plan"):
                        inc["plan"]["status"] = "failed"
                    _transition(inc, "failed", f"workflow:{result.reason}")
            outcome["incident_id"] = inc["incident_id"]
            outcome["terminal_phase"] = inc["phase"]
        self.save(sim, incidents)
        return outcome

    # -- persisted vector index -------------------------------------------

    def save_index(self, index: VectorIndex) -> None:
        np.savez(self.root / INDEX_FILE, matrix=index.matrix)
        meta = {
            "ids": index.ids,
            "corpus_version": index.corpus_version,
            "idf": index.embedder.idf,
            "n_docs": index.embedder.n_docs,
        }
        (self.root / INDEX_META_FILE).write_text(
            json.dumps(meta, sort_keys=True), encoding="utf-8"
        )

    def load_index(self) -> VectorIndex | None:
        meta_p = self.root / INDEX_META_FILE
        npz_p = self.root / INDEX_FILE
        if not meta_p.exists() or not npz_p.exists():
            return None
        meta = json.loads(meta_p.read_text(encoding="utf-8"))
        matrix = np.load(npz_p)["matrix"]
        embedder = LexicalEmbedder(
            load_stopwords(), dict(meta["idf"]), int(meta["n_docs"])
        )
        return VectorIndex(list(meta["ids"]), matrix, meta["corpus_version"], embedder)

    # -- ingested traces ---------------------------------------------------

    def record_trace(self, trace_id: str, source: str | Path) -> Path:
        dest_dir = self.root / "traces"
        dest_dir.mkdir(exist_ok=True)
        dest = dest_dir / f"{trace_id}.jsonl"
        dest.write_bytes(Path(source).read_bytes())
        return dest

    def trace_path(self, trace_id: str) -> Path | None:
        p = self.root / "traces" / f"{trace_id}.jsonl"
        return p if p.exists() else None


def _transition(inc: dict, phase: str, detail: str) -> None:
    inc.setdefault("transitions", []).append({
        "ts": time.time_ns() // 1000,
        "incident_id": inc.get("incident_id"),
        "phase_from": inc.get("phase"),
        "phase_to": phase,
        "detail": detail,
    })
    inc["phase"] = phase
