"""Gateway: prompt assembly, JSON extraction, transport, scripted mocks."""

import json

import httpx
import pytest

from reopt.errors import (
    AuthError,
    GatewayTimeout,
    MockScriptError,
    NoObjectFound,
    TransportError,
)
from reopt.gateway import (
    ChatRequest,
    GatewayConfig,
    MockScript,
    ScriptedPlanner,
    assemble_planner_prompt,
    assemble_selector_prompt,
    chat_complete,
    extract_json,
)
from reopt.gateway.mock import attempt_from_request, delta_from_request
from reopt.gateway.prompts import REPAIR_PRELUDE, render_repair_context
from reopt.agents import FailureRecord
from reopt.model import render_for_planner
from reopt.toolbox import list_strategies


class TestPlannerPrompt:
    def test_contains_delta_and_render(self, toy_state):
        render = render_for_planner(toy_state)
        delta = "Plant 1 cannot ship anything."
        request = assemble_planner_prompt(render, delta)
        assert delta in request.user
        assert render in request.user
        assert "Return JSON only" in request.system
        assert "You are a reoptimization planner" in request.system
        assert "UPDATE_PARAMETER" in request.system

    def test_repair_prelude_first(self, toy_state):
        record = FailureRecord("solve", "no_incumbent", "model infeasible",
                               "loosen the edit",
                               attempt_history=(("apply", "UnknownTarget", "x"),))
        request = assemble_planner_prompt(
            render_for_planner(toy_state), "delta text", repair=record)
        assert request.user.startswith(REPAIR_PRELUDE)
        assert "- failure_stage: solve" in request.user
        assert "- attempt 1 failure: stage=apply" in request.user

    def test_deterministic(self, toy_state):
        render = render_for_planner(toy_state)
        a = assemble_planner_prompt(render, "d", framing="context block")
        b = assemble_planner_prompt(render, "d", framing="context block")
        assert a == b

    def test_framing_included(self, toy_state):
        request = assemble_planner_prompt(
            render_for_planner(toy_state), "d", framing="DOMAIN NOTES HERE")
        assert "DOMAIN NOTES HERE" in request.system


class TestSelectorPrompt:
    def test_lists_available_strategies(self, toy_state):
        catalog = list_strategies(toy_state, {"x": 1.0}, preset_name="toy-default")
        request = assemble_selector_prompt([], catalog, prior_available=True)
        assert "You choose the fastest safe reoptimization solve strategy" in request.system
        assert "- warm:" in request.user
        assert "- scratch:" in request.user
        assert "Prior solution available: yes" in request.user

    def test_hints_section_omitted_when_empty(self, toy_state):
        catalog = list_strategies(toy_state)
        request = assemble_selector_prompt([], catalog, hints={})
        assert "Planner hints" not in request.user

    def test_deterministic(self, toy_state):
        catalog = list_strategies(toy_state)
        assert assemble_selector_prompt([], catalog) == assemble_selector_prompt([], catalog)


class TestExtractJson:
    def test_fenced(self):
        assert extract_json('```json\n{"a": 1}\n```') == {"a": 1}

    def test_prose_then_object(self):
        assert extract_json('Sure thing)) {"a": {"b": 2}} hope that helps') == {"a": {"b": 2}}

    def test_pure_prose(self):
        with pytest.raises(NoObjectFound):
            extract_json("no json here at all")

    def test_braces_inside_strings(self):
        text = '{"a": "closing } inside", "b": 1}'
        assert extract_json(text)["b"] == 1

    def test_round_trips_serialized_docs(self):
        doc = {"edit_summary": "x", "candidate_action_sets": [{"actions": []}],
               "nested": {"deep": [1, 2, {"k": "v"}]}}
        assert extract_json(json.dumps(doc)) == doc


def _transport(handler):
    return httpx.MockTransport(handler)


def _config():
    return GatewayConfig(base_url="https://llm.example/v1", api_key="k",
                         model="test-model", max_retries=1, backoff=0.0)


class TestChatComplete:
    def test_returns_canned_content(self):
        def handler(request):
            body = json.loads(request.content)
            assert body["model"] == "test-model"
            assert body["messages"][0]["role"] == "system"
            return httpx.Response(200, json={
                "choices": [{"message": {"content": "{\"ok\": true}"}}]})

        text = chat_complete(ChatRequest(system="s", user="u"), _config(),
                             transport=_transport(handler))
        assert text == '{"ok": true}'

    def test_unreachable_after_retries(self):
        calls = []

        def handler(request):
            calls.append(1)
            raise httpx.ConnectError("boom")

        with pytest.raises(TransportError):
            chat_complete(ChatRequest(system="s", user="u"), _config(),
                          transport=_transport(handler))
        assert len(calls) == 2  # initial + one retry

    def test_server_errors_retried(self):
        calls = []

        def handler(request):
            calls.append(1)
            if len(calls) == 1:
                return httpx.Response(503)
            return httpx.Response(200, json={
                "choices": [{"message": {"content": "ok"}}]})

        assert chat_complete(ChatRequest(system="s", user="u"), _config(),
                             transport=_transport(handler)) == "ok"

    def test_missing_credential_before_network(self, monkeypatch):
        monkeypatch.delenv("REOPT_LLM_BASE_URL", raising=False)
        monkeypatch.delenv("REOPT_LLM_API_KEY", raising=False)
        with pytest.raises(AuthError):
            chat_complete(ChatRequest(system="s", user="u"))

    def test_auth_rejection(self):
        def handler(request):
            return httpx.Response(401)

        with pytest.raises(AuthError):
            chat_complete(ChatRequest(system="s", user="u"), _config(),
                          transport=_transport(handler))

    def test_timeout_surfaces(self):
        def handler(request):
            raise httpx.ReadTimeout("slow")

        with pytest.raises(GatewayTimeout):
            chat_complete(ChatRequest(system="s", user="u"), _config(),
                          transport=_transport(handler))


class TestMockScript:
    def test_attempt_and_delta_recovered(self, toy_state):
        render = render_for_planner(toy_state)
        first = assemble_planner_prompt(render, "增加 demand by 10")
        assert delta_from_request(first) == "增加 demand by 10"
        assert attempt_from_request(first) == 1
        record = FailureRecord("apply", "UnknownTarget", "bad name", "fix it",
                               attempt_history=(("apply", "UnknownTarget", "x"),))
        second = assemble_planner_prompt(render, "增加 demand by 10", repair=record)
        assert attempt_from_request(second) == 3

    def test_per_attempt_responses(self):
        script = MockScript.from_doc({"entries": [{
            "match": "demand",
            "responses": {"1": "garbage", "2": {"edit_summary": "fixed",
                                                "candidate_action_sets": []}}}]})
        assert script.lookup("raise demand", 1) == "garbage"
        assert json.loads(script.lookup("raise demand", 2))["edit_summary"] == "fixed"

    def test_default_fallback_and_miss(self):
        script = MockScript.from_doc({"entries": [{
            "match": "x", "responses": {"default": "always"}}]})
        assert script.lookup("x marks", 7) == "always"
        with pytest.raises(MockScriptError):
            script.lookup("nothing matches", 1)

    def test_scripted_planner_counts_calls(self, toy_state):
        script = MockScript.from_doc({"entries": [{
            "match": ".*", "responses": {"default": "{}"}}]})
        planner = ScriptedPlanner(script)
        request = assemble_planner_prompt(render_for_planner(toy_state), "anything")
        planner(request)
        planner(request)
        assert len(planner.calls) == 2

    def test_render_repair_context_lines(self):
        record = FailureRecord("prompt_check", "prompt_violation", "cap exceeded",
                               "enforce the cap")
        text = render_repair_context(record)
        assert text.splitlines() == [
            "- failure_stage: prompt_check",
            "- failure_kind: prompt_violation",
            "- failure_message: cap exceeded",
            "- repair_instruction: enforce the cap",
        ]
