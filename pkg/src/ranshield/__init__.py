"""Closed-loop threat mitigation for O-RAN control planes.

Submodules:
  kb        - FiGHT corpus snapshot, deterministic embedder, vector search
  telemetry - RRC/NAS trace store and network-data queries
  agent     - completion providers, guardrails, the capped ReAct loop
  pipeline  - three-stage incident orchestration
  ran       - simulated CU config store with the human approval gate
  evalkit   - scenario fixtures, suite runner, metrics
  service   - HTTP/JSON operational surface
  cli       - command line entry point
"""

__version__ = "0.1.0"
