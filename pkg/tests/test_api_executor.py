import json
import re

import pytest

from agenthost.clock import FixedClock
from agenthost.datamodel import ArtifactFactory, Kind
from agenthost.executors import (
    ApiLlmFormatError,
    Exhausted,
    HttpCallError,
    UnknownEndpoint,
    api_run,
    coerce_input,
    invoke,
    select_and_fill,
    validate,
)
from agenthost.llm import KeyPool, LlmClient, ScriptedProvider, ScriptedTurn
from agenthost.tools import ingest_openapi

from mock_http import MockServer, Response

WEATHER_SPEC = json.dumps(
    {
        "openapi": "3.0.0",
        "info": {"title": "weather", "version": "1"},
        "paths": {
            "/weather/{city}": {
                "get": {
                    "operationId": "getWeather",
                    "summary": "Current weather for a city",
                    "parameters": [
                        {"name": "city", "in": "path", "required": True, "schema": {"type": "string"}},
                        {"name": "days", "in": "query", "schema": {"type": "integer"}},
                    ],
                }
            }
        },
    }
)


def endpoints():
    return ingest_openapi(WEATHER_SPEC, name="XWeather", description="weather lookups").endpoints


def scripted_llm(turns):
    provider = ScriptedProvider(list(turns))
    return LlmClient(provider, KeyPool(["k1"], clock=FixedClock()), timeout_s=5, clock=FixedClock()), provider


def selection_reply(endpoint="getWeather", input_json=None):
    body = json.dumps({"endpoint": endpoint, "input_json": input_json or {"city": "Paris"}})
    return f"```\n{body}\n```"


@pytest.fixture()
def server():
    s = MockServer()
    yield s
    s.close()


class TestSelectAndFill:
    def test_scripted_selection(self):
        llm, _ = scripted_llm([ScriptedTurn(reply=selection_reply())])
        endpoint, input_json = select_and_fill(endpoints(), "weather in Paris", llm)
        assert endpoint.operation_id == "getWeather"
        assert input_json == {"city": "Paris"}

    def test_numeric_string_coerced_per_schema(self):
        llm, _ = scripted_llm(
            [ScriptedTurn(reply=selection_reply(input_json={"city": "Oslo", "days": "3"}))]
        )
        _, input_json = select_and_fill(endpoints(), "weather in Oslo for 3 days", llm)
        assert input_json == {"city": "Oslo", "days": 3}

    def test_unknown_endpoint_raises(self):
        llm, _ = scripted_llm([ScriptedTurn(reply=selection_reply(endpoint="noSuchOp"))])
        with pytest.raises(UnknownEndpoint):
            select_and_fill(endpoints(), "weather", llm)

    def test_unparseable_reply_raises(self):
        llm, _ = scripted_llm([ScriptedTurn(reply="I cannot decide.")])
        with pytest.raises(ApiLlmFormatError):
            select_and_fill(endpoints(), "weather", llm)

    def test_coercion_oracle_schema_validator(self):
        # oracle: after coercion, values conform to their schema types
        schema = {
            "properties": {"a": {"type": "integer"}, "b": {"type": "number"}, "c": {"type": "boolean"}},
        }
        out = coerce_input({"a": "3", "b": "2.5", "c": "true", "d": "keep"}, schema)
        assert out == {"a": 3, "b": 2.5, "c": True, "d": "keep"}
        types = {"a": int, "b": float, "c": bool}
        for key, typ in types.items():
            assert isinstance(out[key], typ)


class TestInvoke:
    def test_echo_json_object_becomes_text_artifact(self, server):
        server.enqueue(Response(json_body={"t": 20}))
        factory = ArtifactFactory()
        art = invoke(endpoints()[0], {"city": "Paris"}, server.base_url, None, factory)
        assert art.kind == Kind.TEXT
        assert json.loads(art.payload) == {"t": 20}
        method, path, _ = server.requests[0]
        assert method == "GET"  # GET endpoints never mutate
        assert path == "/weather/Paris"

    def test_query_params_on_wire(self, server):
        server.enqueue(Response(json_body={"ok": 1}))
        invoke(endpoints()[0], {"city": "Oslo", "days": 3}, server.base_url, None, ArtifactFactory())
        _, path, _ = server.requests[0]
        assert path.startswith("/weather/Oslo?") and "days=3" in path

    def test_list_of_objects_becomes_table(self, server):
        server.enqueue(Response(json_body=[{"day": 1, "temp": 20}, {"day": 2, "temp": 22}]))
        art = invoke(endpoints()[0], {"city": "Paris"}, server.base_url, None, ArtifactFactory())
        assert art.kind == Kind.TABLE
        assert art.payload.columns == ("day", "temp")

    def test_overlength_body_truncated_with_marker(self, server):
        big = "x" * 65536
        server.enqueue(Response(body=big.encode()))
        art = invoke(
            endpoints()[0], {"city": "P"}, server.base_url, None, ArtifactFactory(), response_budget=4096
        )
        assert len(art.payload) <= 4096
        assert art.payload.endswith("…")

    def test_http_error_is_categorized_and_retryable(self, server):
        server.enqueue(Response(status=503, body=b"down"))
        with pytest.raises(HttpCallError) as exc:
            invoke(endpoints()[0], {"city": "P"}, server.base_url, None, ArtifactFactory())
        assert exc.value.status == 503
        assert exc.value.retryable


class TestValidate:
    def first_token_oracle(self, reply):
        m = re.search(r"[A-Za-z]+", reply)
        return (m.group(0).lower() if m else "") == "yes"

    @pytest.mark.parametrize(
        "reply,expected",
        [
            ("yes", True),
            ("No.", False),
            ("Yes, it contains the answer", True),
            ("  YES!", True),
            ("nope", False),
            ("42", False),
            ("", False),
        ],
    )
    def test_first_alpha_token_rule(self, reply, expected):
        llm, _ = scripted_llm([ScriptedTurn(reply=reply)])
        got = validate("output", "input", endpoints(), llm)
        assert got is expected
        assert got == self.first_token_oracle(reply)

    def test_pure_given_scripted_reply(self):
        for _ in range(3):
            llm, _ = scripted_llm([ScriptedTurn(reply="yes")])
            assert validate("o", "i", endpoints(), llm) is True


class TestRunLoop:
    def test_success_on_first_trial(self, server):
        server.enqueue(Response(json_body={"t": 20}))
        llm, provider = scripted_llm(
            [ScriptedTurn(reply=selection_reply()), ScriptedTurn(reply="yes")]
        )
        result = api_run(endpoints(), "weather in Paris", llm, server.base_url, ArtifactFactory())
        assert result.validated
        assert len(result.trials) == 1
        assert result.trials[0].error is None

    def test_flaky_server_recovers_on_second_trial(self, server):
        server.enqueue(Response(status=500, body=b"boom"))
        server.enqueue(Response(json_body={"t": 21}))
        llm, provider = scripted_llm(
            [
                ScriptedTurn(reply=selection_reply()),  # trial 1 selection
                ScriptedTurn(reply=selection_reply(), require=("trial",)),  # retry prompt carries history
                ScriptedTurn(reply="yes"),
            ]
        )
        result = api_run(endpoints(), "weather in Paris", llm, server.base_url, ArtifactFactory())
        assert result.validated
        assert len(result.trials) == 2
        assert "http_error" in result.trials[0].error
        assert result.trials[1].error is None

    def test_always_failing_server_exhausts_after_max_trials(self, server):
        for _ in range(3):
            server.enqueue(Response(status=500, body=b"boom"))
        llm, provider = scripted_llm(
            [
                ScriptedTurn(reply=selection_reply()),
                ScriptedTurn(reply=selection_reply()),
                ScriptedTurn(reply=selection_reply()),
            ]
        )
        with pytest.raises(Exhausted) as exc:
            api_run(endpoints(), "weather", llm, server.base_url, ArtifactFactory(), max_trials=3)
        assert len(exc.value.trials) == 3
        # trial count equals selection-call count
        assert len(provider.calls) == 3

    def test_never_validating_output_returned_flagged(self, server):
        for _ in range(3):
            server.enqueue(Response(json_body={"empty": True}))
        llm, _ = scripted_llm(
            [
                ScriptedTurn(reply=selection_reply()),
                ScriptedTurn(reply="no"),
                ScriptedTurn(reply=selection_reply()),
                ScriptedTurn(reply="no"),
                ScriptedTurn(reply=selection_reply()),
                ScriptedTurn(reply="no"),
            ]
        )
        result = api_run(endpoints(), "weather", llm, server.base_url, ArtifactFactory(), max_trials=3)
        assert not result.validated
        assert len(result.trials) == 3
        assert result.artifact.kind == Kind.TEXT

    def test_trial_outputs_truncated_to_cap(self, server):
        big = "z" * 10000
        server.enqueue(Response(body=big.encode()))
        llm, _ = scripted_llm([ScriptedTurn(reply=selection_reply()), ScriptedTurn(reply="yes")])
        result = api_run(endpoints(), "weather", llm, server.base_url, ArtifactFactory())
        assert len(result.trials[0].output) <= 2048

    @pytest.mark.parametrize("fail_schedule", [(0,), (1,), (0, 1), (0, 2), (1, 2), (0, 1, 2)])
    def test_trial_count_bounded_under_fuzzed_failures(self, server, fail_schedule):
        max_trials = 3
        turns = []
        for i in range(max_trials):
            turns.append(ScriptedTurn(reply=selection_reply()))
            if i in fail_schedule:
                server.enqueue(Response(status=500, body=b"x"))
            else:
                server.enqueue(Response(json_body={"t": i}))
                turns.append(ScriptedTurn(reply="yes"))
        llm, _ = scripted_llm(turns)
        try:
            result = api_run(endpoints(), "q", llm, server.base_url, ArtifactFactory(), max_trials=max_trials)
            assert len(result.trials) <= max_trials
        except Exhausted as e:
            assert len(e.trials) == max_trials

    def test_every_error_carries_taxonomy_category(self, server):
        server.enqueue(Response(status=404, body=b"nope"))
        llm, _ = scripted_llm([ScriptedTurn(reply=selection_reply())])
        with pytest.raises(Exhausted) as exc:
            api_run(endpoints(), "q", llm, server.base_url, ArtifactFactory(), max_trials=1)
        assert exc.value.category == "exhausted"
        assert all(":" in (t.error or ":") for t in exc.value.trials)
