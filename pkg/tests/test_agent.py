import json

import pytest

from ranshield.agent import (
    AgentTranscript,
    CallableProvider,
    ScriptedProvider,
    ToolParam,
    ToolRegistry,
    ToolSpec,
    check_whitelist,
    render_prompt,
    run_react_loop,
    sanitize_completion,
    validate_against_schema,
)
from ranshield.errors import ScriptExhausted, UnknownRole


def _registry(calls=None):
    calls = calls if calls is not None else []

    def handler(name):
        def h(params):
            calls.append((name, params))
            return {"ok": name}
        return h

    return ToolRegistry([
        ToolSpec("get_traffic", "fetch traffic",
                 (ToolParam("trace_id", "string"), ToolParam("ts_from", "int"),
                  ToolParam("ts_to", "int")),
                 mutating=False, allowed_agents=frozenset({"analysis"}),
                 handler=handler("get_traffic")),
        ToolSpec("get_ue_description", "describe UE", (ToolParam("ue_id", "string"),),
                 mutating=False, allowed_agents=frozenset({"analysis", "response"}),
                 handler=handler("get_ue_description")),
        ToolSpec("update_ran_cu_config", "mutate config", (ToolParam("changes", "list"),),
                 mutating=True, allowed_agents=frozenset(), handler=None),
    ]), calls


FINAL = json.dumps({"thought": "done", "final": {"verdict": "benign",
                                                 "event_summary": "s",
                                                 "affected_components": [], "risk": "low"}})
TOOL_CALL = json.dumps({"thought": "look", "action": "get_traffic",
                        "action_input": {"trace_id": "t", "ts_from": 0, "ts_to": 9}})


class TestSanitize:
    def test_fenced_payload_repaired(self):
        raw = '```{"thought":"t","action":"get_traffic","action_input":{}}```'
        payload, verdict = sanitize_completion(raw)
        assert verdict.passed and verdict.repaired
        assert payload["action"] == "get_traffic"

    def test_fenced_with_language_tag(self):
        raw = '```json\n{"thought":"t","final":{}}\n```'
        payload, verdict = sanitize_completion(raw)
        assert verdict.passed and payload == {"thought": "t", "final": {}}

    def test_prose_without_brace_fails(self):
        payload, verdict = sanitize_completion("I cannot answer that.")
        assert payload is None
        assert not verdict.passed and verdict.stage == "sanitize"

    def test_trailing_prose_discarded(self):
        raw = '{"thought":"t","final":{}} hope that helps!'
        payload, verdict = sanitize_completion(raw)
        assert verdict.passed and payload["final"] == {}

    def test_leading_prose_discarded(self):
        raw = 'Sure, here you go: {"thought":"t","final":{}}'
        payload, verdict = sanitize_completion(raw)
        assert verdict.passed and payload["thought"] == "t"

    def test_nested_braces_and_strings(self):
        raw = '{"a": {"b": "}"}, "final": {}} trailing'
        payload, verdict = sanitize_completion(raw)
        assert verdict.passed and payload["a"] == {"b": "}"}

    def test_repaired_implies_passed(self):
        for raw in ["junk", '```{"final":{}}```', '{"final":{}}', "{broken"]:
            _, verdict = sanitize_completion(raw)
            assert not verdict.repaired or verdict.passed

    def test_deterministic(self):
        raw = 'preamble {"thought":"x","final":{"a":1}} postamble'
        assert sanitize_completion(raw) == sanitize_completion(raw)


class TestSchema:
    def setup_method(self):
        registry, _ = _registry()
        self.tools = {t.name: t for t in registry.for_role("analysis")}

    def test_missing_required_param_named(self):
        payload = {"thought": "t", "action": "get_traffic", "action_input": {"trace_id": "x"}}
        cleaned, verdict = validate_against_schema(payload, self.tools)
        assert cleaned is None and not verdict.passed
        assert "ts_from" in verdict.violation

    def test_wrong_param_type(self):
        payload = {"thought": "t", "action": "get_ue_description",
                   "action_input": {"ue_id": 42}}
        _, verdict = validate_against_schema(payload, self.tools)
        assert not verdict.passed

    def test_unknown_extra_keys_dropped(self):
        payload = {"thought": "t", "action": "get_ue_description",
                   "action_input": {"ue_id": "u", "verbose": True}}
        cleaned, verdict = validate_against_schema(payload, self.tools)
        assert verdict.passed
        assert "verbose" not in cleaned["action_input"]

    def test_valid_final_answer_passes(self):
        cleaned, verdict = validate_against_schema({"thought": "t", "final": {"x": 1}}, self.tools)
        assert verdict.passed and cleaned["final"] == {"x": 1}

    def test_missing_action_and_final(self):
        _, verdict = validate_against_schema({"thought": "t"}, self.tools)
        assert not verdict.passed


class TestWhitelist:
    def test_unregistered_tool(self):
        registry, _ = _registry()
        verdict = check_whitelist("disable_cell", "analysis", registry)
        assert not verdict.passed and verdict.stage == "whitelist"

    def test_role_restriction(self):
        registry, _ = _registry()
        assert not check_whitelist("get_traffic", "response", registry).passed
        assert check_whitelist("get_traffic", "analysis", registry).passed

    def test_mutating_tool_never_whitelisted_for_loops(self):
        registry, _ = _registry()
        for role in ("analysis", "classification", "response"):
            assert not check_whitelist("update_ran_cu_config", role, registry).passed


class TestRenderPrompt:
    def test_deterministic(self):
        registry, _ = _registry()
        a = render_prompt("analysis", registry, "ctx", ["doc"], [])
        b = render_prompt("analysis", registry, "ctx", ["doc"], [])
        assert a == b

    def test_unknown_role(self):
        registry, _ = _registry()
        with pytest.raises(UnknownRole):
            render_prompt("wizard", registry, "ctx", [], [])

    def test_empty_tool_set_mentions_no_tools(self):
        registry = ToolRegistry([])
        prompt = render_prompt("classification", registry, "ctx", [], [])
        assert "No tools available" in prompt

    def test_prior_steps_appear_in_order(self):
        registry, _ = _registry()
        provider = ScriptedProvider({
            "s/analysis/1": TOOL_CALL,
            "s/analysis/2": json.dumps({"thought": "again", "action": "get_ue_description",
                                        "action_input": {"ue_id": "u"}}),
            "s/analysis/3": FINAL,
        })
        t = run_react_loop("analysis", provider, registry, "ctx", scenario_id="s")
        prompt = render_prompt("analysis", registry, "ctx", [], t.steps[:2])
        assert prompt.index("get_traffic(") < prompt.index("get_ue_description(")


class TestReactLoop:
    def test_immediate_final_answer(self):
        registry, calls = _registry()
        provider = ScriptedProvider({"s/analysis/1": FINAL})
        t = run_react_loop("analysis", provider, registry, "ctx", scenario_id="s")
        assert t.outcome == "final_answer"
        assert len(t.steps) == 1 and calls == []

    def test_iteration_limit_at_exactly_5(self):
        registry, calls = _registry()
        provider = CallableProvider(lambda *a: TOOL_CALL)
        t = run_react_loop("analysis", provider, registry, "ctx", scenario_id="s")
        assert t.outcome == "iteration_limit"
        assert len(t.steps) == 5 and len(calls) == 5

    def test_unregistered_tool_twice_aborts_without_execution(self):
        registry, calls = _registry()
        bad = json.dumps({"thought": "x", "action": "rm_rf", "action_input": {}})
        provider = CallableProvider(lambda *a: bad)
        t = run_react_loop("analysis", provider, registry, "ctx", scenario_id="s")
        assert t.outcome == "guardrail_abort"
        assert calls == []
        assert t.provider_calls == 2  # original + single repair turn

    def test_malformed_then_repaired(self):
        registry, calls = _registry()
        replies = iter(["total garbage", FINAL])
        provider = CallableProvider(lambda *a: next(replies))
        t = run_react_loop("analysis", provider, registry, "ctx", scenario_id="s")
        assert t.outcome == "final_answer"
        assert t.provider_calls == 2

    def test_script_exhaustion_is_provider_failure(self):
        registry, _ = _registry()
        provider = ScriptedProvider({"s/analysis/1": TOOL_CALL})
        t = run_react_loop("analysis", provider, registry, "ctx", scenario_id="s")
        assert t.outcome == "provider_failure"

    def test_tool_error_becomes_observation(self):
        def boom(params):
            raise RuntimeError("backend down")

        registry = ToolRegistry([
            ToolSpec("get_traffic", "d", (), mutating=False,
                     allowed_agents=frozenset({"analysis"}), handler=boom),
        ])
        provider = ScriptedProvider({
            "s/analysis/1": json.dumps({"thought": "x", "action": "get_traffic",
                                        "action_input": {}}),
            "s/analysis/2": FINAL,
        })
        t = run_react_loop("analysis", provider, registry, "ctx", scenario_id="s")
        assert t.outcome == "final_answer"
        assert "ERROR RuntimeError" in t.steps[0].observation

    def test_replay_reproduces_transcript(self):
        registry, _ = _registry()
        script = {"s/analysis/1": TOOL_CALL, "s/analysis/2": FINAL}
        t1 = run_react_loop("analysis", ScriptedProvider(script), registry, "ctx",
                            scenario_id="s")
        t2 = run_react_loop("analysis", ScriptedProvider(script), registry, "ctx",
                            scenario_id="s")
        assert [s.to_dict() for s in t1.steps] == [s.to_dict() for s in t2.steps]
        assert t1.outcome == t2.outcome

    def test_transcript_jsonl_has_terminal_summary(self):
        registry, _ = _registry()
        t = run_react_loop("analysis", ScriptedProvider({"s/analysis/1": FINAL}),
                           registry, "ctx", scenario_id="s")
        lines = t.to_jsonl().strip().splitlines()
        assert len(lines) == 2
        assert json.loads(lines[-1])["outcome"] == "final_answer"
