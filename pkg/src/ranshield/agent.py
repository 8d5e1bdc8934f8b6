"""Completion providers, guardrail stack, and the iteration-capped ReAct loop.

Every completion flows through the same three guardrail stages, in order:
sanitize (extract a JSON object from arbitrary text), schema (required keys,
closed sets, tool param types), whitelist (the tool must be registered and
allowed for the calling role). A stage failure earns exactly one repair turn
back to the provider; a second failure aborts the loop. No tool executes
until all three stages pass.
"""

from __future__ import annotations

import json
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ProviderUnavailable, ScriptExhausted, UnknownRole

MAX_ITERATIONS = 5

PARAM_TYPES = {
    "string": str,
    "int": int,
    "number": (int, float),
    "bool": bool,
    "object": dict,
    "list": list,
}


@dataclass(frozen=True)
class ToolParam:
    name: str
    kind: str  # key into PARAM_TYPES
    required: bool = True


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    params: tuple[ToolParam, ...]
    mutating: bool
    allowed_agents: frozenset[str]
    handler: Callable[[dict], Any] | None = None


class ToolRegistry:
    def __init__(self, tools: list[ToolSpec] | None = None):
        self._tools: dict[str, ToolSpec] = {}
        for t in tools or []:
            self.register(t)

    def register(self, tool: ToolSpec) -> None:
        if tool.name in self._tools:
            raise ValueError(f"duplicate tool name {tool.name!r}")
        # Mutating tools are reserved for the action-workflow layer; no
        # reasoning loop may hold them.
        if tool.mutating and tool.allowed_agents:
            raise ValueError(f"mutating tool {tool.name!r} cannot be loop-callable")
        self._tools[tool.name] = tool

    def get(self, name: str) -> ToolSpec | None:
        return self._tools.get(name)

    def names(self) -> list[str]:
        return sorted(self._tools)

    def for_role(self, role: str) -> list[ToolSpec]:
        return [t for t in self._tools.values() if role in t.allowed_agents]


# --- providers -----------------------------------------------------------

class CompletionProvider:
    """Contract: (prompt, role, step metadata) -> completion text."""

    def complete(self, prompt: str, *, role: str, scenario_id: str, call_index: int) -> str:
        raise NotImplementedError


class ScriptedProvider(CompletionProvider):
    """Replays canned completions keyed by ``scenario_id/role/call_index``."""

    def __init__(self, script: dict[str, str]):
        self.script = dict(script)

    @classmethod
    def from_file(cls, path) -> "ScriptedProvider":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def complete(self, prompt: str, *, role: str, scenario_id: str, call_index: int) -> str:
        key = f"{scenario_id}/{role}/{call_index}"
        if key not in self.script:
            raise ScriptExhausted(f"no scripted completion for {key!r}")
        return self.script[key]


class CallableProvider(CompletionProvider):
    """Wraps a plain function; handy in tests and fuzzing."""

    def __init__(self, fn: Callable[[str, str, str, int], str]):
        self.fn = fn

    def complete(self, prompt: str, *, role: str, scenario_id: str, call_index: int) -> str:
        return self.fn(prompt, role, scenario_id, call_index)


class RemoteProvider(CompletionProvider):
    """Minimal HTTP completion backend: one retry on timeout with 2x backoff."""

    def __init__(self, endpoint: str, model: str, auth_token: str = "",
                 timeout_s: float = 30.0):
        self.endpoint = endpoint
        self.model = model
        self.auth_token = auth_token
        self.timeout_s = timeout_s

    def complete(self, prompt: str, *, role: str, scenario_id: str, call_index: int) -> str:
        body = json.dumps({"model": self.model, "prompt": prompt}).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        timeout = self.timeout_s
        last_exc: Exception | None = None
        for _ in range(2):  # original call + one retry
            req = urllib.request.Request(self.endpoint, data=body, headers=headers)
            try:
                with urllib.request.urlopen(req, timeout=timeout) as resp:
                    payload = json.loads(resp.read().decode("utf-8"))
                    return str(payload.get("completion", ""))
            except (urllib.error.URLError, TimeoutError, OSError) as exc:
                last_exc = exc
                timeout *= 2
        raise ProviderUnavailable(f"remote provider failed after retry: {last_exc}")


# --- guardrails ----------------------------------------------------------

@dataclass(frozen=True)
class GuardrailVerdict:
    stage: str  # sanitize | schema | whitelist
    passed: bool
    violation: str | None = None
    repaired: bool = False


def _balanced_object(text: str) -> str | None:
    """Return the substring from the first '{' to its balance-matched '}'."""
    start = text.find("{")
    if start < 0:
        return None
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        c = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif c == "\\":
                escaped = True
            elif c == '"':
                in_string = False
            continue
        if c == '"':
            in_string = True
        elif c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None


def sanitize_completion(raw: str) -> tuple[dict | None, GuardrailVerdict]:
    """Extract and parse the first balanced JSON object from raw model text."""
    stripped = raw.strip()
    fenced = stripped
    if fenced.startswith("```") and fenced.endswith("```") and len(fenced) >= 6:
        fenced = fenced[3:-3]
        if "\n" in fenced and fenced.split("\n", 1)[0].strip().isalpha():
            fenced = fenced.split("\n", 1)[1]  # drop a ```json language tag
        fenced = fenced.strip()
    candidate = _balanced_object(fenced)
    if candidate is None:
        return None, GuardrailVerdict("sanitize", False, "no JSON object found")
    try:
        payload = json.loads(candidate)
    except json.JSONDecodeError as exc:
        return None, GuardrailVerdict("sanitize", False, f"unparseable JSON: {exc}")
    if not isinstance(payload, dict):
        return None, GuardrailVerdict("sanitize", False, "top-level value is not an object")
    repaired = candidate != stripped
    return payload, GuardrailVerdict("sanitize", True, repaired=repaired)


def validate_against_schema(
    payload: dict, tools: dict[str, ToolSpec]
) -> tuple[dict | None, GuardrailVerdict]:
    """Check the ReAct completion shape; unknown extra keys are dropped."""
    if "final" in payload:
        cleaned = {"thought": payload.get("thought", ""), "final": payload["final"]}
        if not isinstance(cleaned["final"], dict):
            return None, GuardrailVerdict("schema", False, "final payload must be an object")
        return cleaned, GuardrailVerdict("schema", True)

    action = payload.get("action")
    if not isinstance(action, str) or not action:
        return None, GuardrailVerdict("schema", False, "missing 'action' or 'final'")
    action_input = payload.get("action_input", {})
    if not isinstance(action_input, dict):
        return None, GuardrailVerdict("schema", False, "'action_input' must be an object")

    spec = tools.get(action)
    if spec is not None:
        for p in spec.params:
            if p.name not in action_input:
                if p.required:
                    return None, GuardrailVerdict(
                        "schema", False, f"missing required param {p.name!r}"
                    )
                continue
            expected = PARAM_TYPES[p.kind]
            if not isinstance(action_input[p.name], expected):
                return None, GuardrailVerdict(
                    "schema", False, f"param {p.name!r} is not {p.kind}"
                )
        known = {p.name for p in spec.params}
        action_input = {k: v for k, v in action_input.items() if k in known}

    cleaned = {
        "thought": payload.get("thought", ""),
        "action": action,
        "action_input": action_input,
    }
    return cleaned, GuardrailVerdict("schema", True)


def check_whitelist(
    action: str, role: str, registry: ToolRegistry
) -> GuardrailVerdict:
    spec = registry.get(action)
    if spec is None:
        return GuardrailVerdict("whitelist", False, f"tool {action!r} is not registered")
    if role not in spec.allowed_agents:
        return GuardrailVerdict(
            "whitelist", False, f"tool {action!r} not allowed for role {role!r}"
        )
    return GuardrailVerdict("whitelist", True)


# --- prompt templates ----------------------------------------------------

_ROLE_PREAMBLES = {
    "analysis": (
        "You are the triage analyst for a RAN security control loop. Inspect the "
        "reported event, correlate it with trace data, and decide whether it is a "
        "real threat, a benign fault, or a false positive.\n"
        "Example:\n"
        '{"thought": "check recent traffic", "action": "get_traffic", '
        '"action_input": {"trace_id": "t1", "ts_from": 0, "ts_to": 10}}\n'
        '{"thought": "clear evidence of tampering", "final": {"verdict": "threat", '
        '"event_summary": "...", "affected_components": ["O-CU"], "risk": "high"}}'
    ),
    "classification": (
        "You are the threat classification analyst. Map the report to catalogued "
        "attack techniques using only the retrieved candidates listed in context.\n"
        "Example:\n"
        '{"thought": "fetch mitigations", "action": "get_mitigations", '
        '"action_input": {"technique_id": "FGT0000"}}\n'
        '{"thought": "best match found", "final": {"selected_technique_ids": ["FGT0000"]}}'
    ),
    "response": (
        "You are the response planner. Draft a step-by-step plan using only the "
        "safe control API catalog shown below; if no viable plan exists, answer "
        'with {"final": {"no_plan": true}}.\n'
        "Example:\n"
        '{"thought": "plan ready", "final": {"plan": {"steps": ['
        '{"tool_name": "get_ran_cu_config", "params": {}, "rationale": "baseline"}]}}}'
    ),
}


def render_prompt(
    role: str,
    registry: ToolRegistry,
    task_context: str,
    documents: list[str],
    steps: list["ReactStep"],
) -> str:
    if role not in _ROLE_PREAMBLES:
        raise UnknownRole(f"no prompt template for role {role!r}")
    lines = [_ROLE_PREAMBLES[role], ""]
    tools = registry.for_role(role)
    if tools:
        lines.append("Available tools:")
        for t in sorted(tools, key=lambda t: t.name):
            params = ", ".join(
                f"{p.name}: {p.kind}{'' if p.required else '?'}" for p in t.params
            )
            lines.append(f"- {t.name}({params}): {t.description}")
    else:
        lines.append("No tools available; answer directly with a final payload.")
    lines.append("")
    lines.append("Context:")
    lines.append(task_context)
    for doc in documents:
        lines.append("---")
        lines.append(doc)
    if steps:
        lines.append("")
        lines.append("Previous steps:")
        for s in steps:
            lines.append(f"Thought: {s.thought}")
            lines.append(f"Action: {s.action_name}({json.dumps(s.action_params, sort_keys=True)})")
            lines.append(f"Observation: {s.observation}")
    lines.append("")
    lines.append("Respond with a single JSON object.")
    return "\n".join(lines)


# --- the loop ------------------------------------------------------------

@dataclass
class ReactStep:
    index: int
    thought: str
    action_name: str | None  # None for a final answer
    action_params: dict | None
    final_payload: dict | None
    observation: str | None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "thought": self.thought,
            "action_name": self.action_name,
            "action_params": self.action_params,
            "final_payload": self.final_payload,
            "observation": self.observation,
        }


@dataclass
class AgentTranscript:
    agent_role: str
    scenario_id: str
    steps: list[ReactStep] = field(default_factory=list)
    outcome: str = "provider_failure"  # final_answer | iteration_limit | guardrail_abort | provider_failure
    final_payload: dict | None = None
    guardrail_verdicts: list[GuardrailVerdict] = field(default_factory=list)
    wall_clock_ms: float = 0.0
    provider_calls: int = 0

    def tool_calls(self) -> list[str]:
        return [s.action_name for s in self.steps if s.action_name]

    def to_jsonl(self) -> str:
        lines = [json.dumps(s.to_dict(), sort_keys=True) for s in self.steps]
        lines.append(
            json.dumps(
                {
                    "agent_role": self.agent_role,
                    "scenario_id": self.scenario_id,
                    "outcome": self.outcome,
                    "final_payload": self.final_payload,
                    "wall_clock_ms": self.wall_clock_ms,
                },
                sort_keys=True,
            )
        )
        return "\n".join(lines) + "\n"


_REPAIR_SUFFIX = (
    "\nYour previous reply was rejected: {reason}. "
    "Re-emit exactly one valid JSON object in the required shape."
)


def run_react_loop(
    role: str,
    provider: CompletionProvider,
    registry: ToolRegistry,
    task_context: str,
    documents: list[str] | None = None,
    scenario_id: str = "adhoc",
) -> AgentTranscript:
    """Run one guardrailed reasoning loop; at most 5 steps plus one repair
    turn per malformed completion (worst case 10 provider calls)."""
    documents = documents or []
    transcript = AgentTranscript(agent_role=role, scenario_id=scenario_id)
    tools_for_role = {t.name: t for t in registry.for_role(role)}
    started = time.monotonic()
    call_index = 0

    def ask(prompt: str) -> str:
        nonlocal call_index
        call_index += 1
        transcript.provider_calls += 1
        return provider.complete(
            prompt, role=role, scenario_id=scenario_id, call_index=call_index
        )

    for step_index in range(1, MAX_ITERATIONS + 1):
        prompt = render_prompt(role, registry, task_context, documents, transcript.steps)
        cleaned: dict | None = None
        try:
            raw = ask(prompt)
        except (ProviderUnavailable, ScriptExhausted):
            transcript.outcome = "provider_failure"
            break

        for attempt in range(2):  # original + one repair turn
            payload, verdict = sanitize_completion(raw)
            transcript.guardrail_verdicts.append(verdict)
            if verdict.passed:
                cleaned, verdict = validate_against_schema(payload, tools_for_role)
                transcript.guardrail_verdicts.append(verdict)
            if verdict.passed and cleaned is not None and "action" in cleaned:
                verdict = check_whitelist(cleaned["action"], role, registry)
                transcript.guardrail_verdicts.append(verdict)
                if not verdict.passed:
                    cleaned = None
            if verdict.passed:
                break
            cleaned = None
            if attempt == 0:
                try:
                    raw = ask(prompt + _REPAIR_SUFFIX.format(reason=verdict.violation))
                except (ProviderUnavailable, ScriptExhausted):
                    transcript.outcome = "provider_failure"
                    transcript.wall_clock_ms = (time.monotonic() - started) * 1000
                    return transcript

        if cleaned is None:
            transcript.outcome = "guardrail_abort"
            break

        if "final" in cleaned:
            transcript.steps.append(
                ReactStep(
                    index=step_index,
                    thought=cleaned["thought"],
                    action_name=None,
                    action_params=None,
                    final_payload=cleaned["final"],
                    observation=None,
                )
            )
            transcript.final_payload = cleaned["final"]
            transcript.outcome = "final_answer"
            break

        name = cleaned["action"]
        params = cleaned["action_input"]
        spec = tools_for_role[name]
        try:
            result = spec.handler(params) if spec.handler else None
            observation = json.dumps(result, sort_keys=True, default=str)
        except Exception as exc:  # tool errors are observations, not aborts
            observation = f"ERROR {type(exc).__name__}: {exc}"
        transcript.steps.append(
            ReactStep(
                index=step_index,
                thought=cleaned["thought"],
                action_name=name,
                action_params=params,
                final_payload=None,
                observation=observation,
            )
        )
    else:
        transcript.outcome = "iteration_limit"

    transcript.wall_clock_ms = (time.monotonic() - started) * 1000
    return transcript
