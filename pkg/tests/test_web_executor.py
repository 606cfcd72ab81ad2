import json
import random
import threading
from pathlib import Path

import pytest

from agenthost.agents.types import OBS_INTERRUPTED, ToolContext
from agenthost.clock import FixedClock
from agenthost.datamodel import ArtifactFactory
from agenthost.llm import KeyPool, LlmClient, ScriptedProvider, ScriptedTurn
from agenthost.web import (
    SimulatorDriver,
    StaleElement,
    WebAction,
    WebotExecutor,
    format_previous_actions,
    process_dom,
    web_task,
)
from agenthost.web.runner import Attempt, WebStep

FIXTURES = Path(__file__).parent / "fixtures"

FLIGHTS_URL = "https://sim.example/flights"


def webot_turn(thought, action):
    return f"<Thought>{thought}</Thought>\n<Action>{action}</Action>"


def scripted_llm(turns):
    provider = ScriptedProvider(list(turns))
    return (
        LlmClient(provider, KeyPool(["k1"], clock=FixedClock()), timeout_s=5, clock=FixedClock()),
        provider,
    )


def flights_driver():
    return SimulatorDriver(FIXTURES / "site_flights")


class TestProcessDom:
    def test_single_button_page(self):
        raw = {"url": "u", "title": "t", "body": [{"tag": "button", "key": "b", "text": "Go"}]}
        snap = process_dom(raw, budget=1000)
        assert len(snap.elements) == 1
        el = snap.elements[0]
        assert (el.id, el.tag, el.visible_text) == (1, "button", "Go")
        assert "<button id=1>Go</button>" in snap.processed_html

    def test_ids_in_document_order_interactable_only(self):
        raw = {
            "body": [
                {"tag": "h1", "text": "Title"},
                {"tag": "a", "key": "l", "text": "Link"},
                {"tag": "p", "text": "prose"},
                {"tag": "input", "key": "i", "label": "Name"},
                {"tag": "input", "key": "hidden", "label": "x", "visible": False},
                {"tag": "button", "key": "b", "text": "Ok"},
            ]
        }
        snap = process_dom(raw, budget=5000)
        assert [(e.id, e.tag) for e in snap.elements] == [(1, "a"), (2, "input"), (3, "button")]

    def test_determinism(self):
        raw = json.loads((FIXTURES / "site_flights" / "search.json").read_text())
        assert process_dom(raw, 2000) == process_dom(raw, 2000)

    def test_budget_cap_keeps_marker_and_ids(self):
        raw = {
            "body": [{"tag": "p", "text": "lorem ipsum " * 50}]
            + [{"tag": "a", "key": f"k{i}", "text": f"link {i}"} for i in range(5)]
        }
        uncapped = process_dom(raw, budget=100000)
        capped = process_dom(raw, budget=300)
        assert len(capped.processed_html) <= 300 + 1
        assert "truncated" in capped.processed_html
        # id assignment is independent of the text budget
        assert [e.id for e in capped.elements] == [e.id for e in uncapped.elements]


class TestFormatPreviousActions:
    def test_empty(self):
        assert format_previous_actions([]) == ""

    def test_single_ok_line(self):
        steps = [WebStep(index=1, thought="t", attempts=[Attempt("click(3)", "ok")])]
        assert format_previous_actions(steps) == "1. click(3) — ok"

    def test_retried_step_renders_both_attempts(self):
        steps = [
            WebStep(
                index=2,
                thought="t",
                attempts=[
                    Attempt("click(999)", "failed: element id 999 is not on the current page (valid ids: 1, 2)"),
                    Attempt("click(2)", "ok"),
                ],
            )
        ]
        out = format_previous_actions(steps)
        assert out.splitlines() == [
            "2. click(999) — failed: element id 999 is not on the current page (valid ids: 1, 2)",
            "2. click(2) — ok",
        ]


class TestSimulatorDriver:
    def test_navigate_and_snapshot(self):
        driver = flights_driver()
        driver.navigate(FLIGHTS_URL)
        snap = driver.snapshot()
        assert snap.title == "Flight Search"
        assert [e.tag for e in snap.elements] == ["a", "input", "input", "a", "button"]

    def test_set_value_then_submit_transitions(self):
        driver = flights_driver()
        driver.navigate(FLIGHTS_URL)
        snap = driver.snapshot()
        driver.perform(WebAction("setValue", element_id=2, text="New York"))
        driver.perform(WebAction("click", element_id=5))
        assert driver.submitted["search"]["city"] == "New York"
        after = driver.snapshot()
        assert after.title == "Flight Results"

    def test_stale_id_after_page_change(self):
        driver = flights_driver()
        driver.navigate(FLIGHTS_URL)
        driver.snapshot()
        driver.perform(WebAction("click", element_id=5))  # transition happens
        with pytest.raises(StaleElement):
            driver.perform(WebAction("click", element_id=1))  # no fresh snapshot taken

    def test_unknown_id_is_stale_element(self):
        driver = flights_driver()
        driver.navigate(FLIGHTS_URL)
        driver.snapshot()
        with pytest.raises(StaleElement):
            driver.perform(WebAction("click", element_id=99))

    def test_dropdown_options_appear_after_setvalue(self):
        driver = SimulatorDriver(FIXTURES / "site_dropdown")
        driver.navigate("https://sim.example/form")
        driver.snapshot()
        driver.perform(WebAction("setValue", element_id=1, text="New"))
        snap = driver.snapshot()
        options = [e for e in snap.elements if e.tag == "option"]
        assert [o.visible_text for o in options] == ["New York, NY", "Newark, NJ"]
        driver.perform(WebAction("click", element_id=options[0].id))
        final = driver.snapshot()
        city = [e for e in final.elements if e.key == "city"][0]
        assert city.input_value == "New York, NY"
        assert driver.option_rule_violations == []

    def test_skipping_option_click_records_violation(self):
        driver = SimulatorDriver(FIXTURES / "site_dropdown")
        driver.navigate("https://sim.example/form")
        driver.snapshot()
        driver.perform(WebAction("setValue", element_id=1, text="New"))
        snap = driver.snapshot()
        submit = [e for e in snap.elements if e.key == "go"][0]
        driver.perform(WebAction("click", element_id=submit.id))
        assert driver.option_rule_violations  # the golden scenario must keep this empty


class TestWebTask:
    def golden_turns(self):
        return [
            ScriptedTurn(reply=webot_turn("enter the destination city", 'setValue(2, "New York")')),
            ScriptedTurn(reply=webot_turn("now search", "click(5)")),
            ScriptedTurn(reply=webot_turn("the results answer the question", 'finish("Budget Air at $120 is cheapest")')),
        ]

    def test_form_scenario_ends_finish_in_three_steps(self):
        llm, _ = scripted_llm(self.golden_turns())
        driver = flights_driver()
        report = web_task("find flights to New York", FLIGHTS_URL, driver, llm, clock=FixedClock())
        assert report.ended_by == "finish"
        assert len(report.steps) == 3
        assert report.answer == "Budget Air at $120 is cheapest"
        # simulator end-state oracle: the form field took the value and submit fired
        assert driver.submitted["search"]["city"] == "New York"
        assert report.final_snapshot.title == "Flight Results"

    def test_invalid_id_corrected_after_retry(self):
        turns = [
            ScriptedTurn(reply=webot_turn("click something", "click(999)")),
            ScriptedTurn(
                reply=webot_turn("try the real button", "click(5)"),
                require=("Your last answer has some problem", "999"),
            ),
            ScriptedTurn(reply=webot_turn("done", 'finish("ok")')),
        ]
        llm, provider = scripted_llm(turns)
        report = web_task("press the button", FLIGHTS_URL, flights_driver(), llm, clock=FixedClock())
        assert report.ended_by == "finish"
        first_step = report.steps[0]
        assert len(first_step.attempts) == 2  # one failure, one retry
        assert first_step.attempts[0].outcome.startswith("failed:")
        assert first_step.attempts[1].outcome == "ok"

    def test_driver_failure_retried_once(self):
        turns = [
            ScriptedTurn(reply=webot_turn("press it", "click(1)")),
            ScriptedTurn(reply=webot_turn("press it again", "click(1)"), require=("did not respond",)),
            ScriptedTurn(reply=webot_turn("done", 'finish("pressed")')),
        ]
        llm, _ = scripted_llm(turns)
        report = web_task("do it", "https://sim.example/flaky", SimulatorDriver(FIXTURES / "site_flaky"), llm, clock=FixedClock())
        assert report.ended_by == "finish"
        assert [a.outcome.startswith("failed") for a in report.steps[0].attempts] == [True, False]

    def test_missing_tags_counts_as_failed_attempt(self):
        turns = [
            ScriptedTurn(reply="I will just talk instead of acting."),
            ScriptedTurn(reply=webot_turn("ok", 'finish("fine")'), require=("<Thought>",)),
        ]
        llm, _ = scripted_llm(turns)
        report = web_task("task", FLIGHTS_URL, flights_driver(), llm, clock=FixedClock())
        assert report.ended_by == "finish"
        assert report.steps[0].attempts[0].outcome.startswith("failed:")

    def test_retry_bound_under_fuzzed_failure_schedules(self):
        rng = random.Random(31337)
        for _ in range(12):
            n_steps = rng.randint(1, 4)
            turns = []
            for s in range(n_steps):
                fail_first = rng.random() < 0.5
                if fail_first:
                    turns.append(ScriptedTurn(reply=webot_turn("t", f"click({rng.randint(50, 99)})")))
                    # after a failed attempt the runner always re-prompts once
                    turns.append(ScriptedTurn(reply=webot_turn("t", "click(1)")))
                else:
                    turns.append(ScriptedTurn(reply=webot_turn("t", "click(1)")))
            turns.append(ScriptedTurn(reply=webot_turn("t", 'finish("x")')))
            llm, provider = scripted_llm(turns)
            report = web_task("task", FLIGHTS_URL, flights_driver(), llm, clock=FixedClock(), step_cap=10)
            assert report.ended_by == "finish"
            for step in report.steps:
                assert len(step.attempts) <= 2  # at most one retry per action
            assert len(provider.calls) <= 2 * len(report.steps)

    def test_step_cap(self):
        turns = [ScriptedTurn(reply=webot_turn("again", "click(1)")) for _ in range(4)]
        llm, _ = scripted_llm(turns)
        report = web_task("loop", FLIGHTS_URL, flights_driver(), llm, clock=FixedClock(), step_cap=4)
        assert report.ended_by == "step_cap"
        assert len(report.steps) == 4

    def test_cancel_mid_run_is_interrupted(self):
        cancel = threading.Event()

        class CancellingDriver(SimulatorDriver):
            def perform(self, action):
                super().perform(action)
                cancel.set()  # user hits stop right after the first action

        turns = self.golden_turns()
        llm, _ = scripted_llm(turns)
        driver = CancellingDriver(FIXTURES / "site_flights")
        report = web_task("find flights", FLIGHTS_URL, driver, llm, clock=FixedClock(), cancel=cancel)
        assert report.ended_by == "interrupted"

    def test_identical_runs_produce_identical_reports(self):
        def run():
            llm, _ = scripted_llm(self.golden_turns())
            report = web_task("find flights to New York", FLIGHTS_URL, flights_driver(), llm, clock=FixedClock())
            return (
                report.ended_by,
                report.answer,
                format_previous_actions(report.steps),
                report.final_snapshot.processed_html,
            )

        assert run() == run()


class TestWebotExecutor:
    def test_interrupted_observation_flags_interruption(self):
        cancel = threading.Event()
        cancel.set()
        llm, _ = scripted_llm([])
        executor = WebotExecutor(flights_driver, FLIGHTS_URL)
        ctx = ToolContext(factory=ArtifactFactory(), llm=llm, clock=FixedClock(), cancel=cancel)
        obs = executor.run("find flights", ctx)
        assert obs.status == OBS_INTERRUPTED
        assert "interrupted" in obs.artifacts[0].payload.message.lower()

    def test_finish_reports_answer(self):
        llm, _ = scripted_llm(
            [ScriptedTurn(reply=webot_turn("done", 'finish("the answer is 42")'))]
        )
        executor = WebotExecutor(flights_driver, FLIGHTS_URL)
        ctx = ToolContext(factory=ArtifactFactory(), llm=llm, clock=FixedClock())
        obs = executor.run("what is the answer", ctx)
        assert obs.status == "ok"
        assert "the answer is 42" in obs.artifacts[0].payload
