from __future__ import annotations

import json
import threading
from collections import Counter
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from planact.errors import (
    EndpointError,
    PlanInvalidError,
    SessionNotTerminalError,
)
from planact.hub import FailurePlan, ToolHub
from planact.memory import MemoryHub, UserMaterial
from planact.orchestrator import (
    ACTING,
    Goal,
    Orchestrator,
    RunConfig,
    Session,
    run_plan_again,
)
from planact.plan import (
    FAILURE,
    SUCCESS,
    copy_plan,
    reset,
    tool_sequence,
    validate_plan,
)
from planact.policies import (
    EndpointConfig,
    ExternalPlanner,
    ScriptedPlanner,
    make_plan,
    make_step,
)

from .conftest import two_step_plan_text


def build(goal_text: str, plan) -> tuple[Orchestrator, ToolHub, MemoryHub]:
    hub = ToolHub()
    memory = MemoryHub()
    policy = ScriptedPlanner.for_plan(goal_text, plan)
    return Orchestrator(hub, memory, policy), hub, memory


def single_step_plan():
    return make_plan("one clip", [make_step(1, "text2video_gen", "a quiet street")])


# ---------------------------------------------------------------------------
# happy paths

def test_single_step_task_completes():
    goal = Goal("one quiet street clip")
    orch, hub, _ = build(goal.goal_text, single_step_plan())
    session = orch.run_task(goal)
    assert session.state == "completed"
    final = hub.trace(session.session_id)[-1].result.artifact
    assert final.kind == "video"
    assert session.plan.steps[0].output == final.uri


def test_story_goal_end_to_end():
    hub = ToolHub()
    orch = Orchestrator(hub, MemoryHub(), ScriptedPlanner())
    session = orch.run_task(
        Goal("generate a 20-second story video", constraints={"total_duration_s": 20})
    )
    assert session.state == "completed"
    counts = Counter(r.call.tool_name for r in session.history)
    assert counts["text2video_gen"] == 4
    assert counts["merge_video"] == 1
    assert session.storyboard_writes == 1
    kinds = [e["type"] for e in session.transcript.events]
    assert kinds.index("storyboard_write") < kinds.index("advance")


def test_output_from_reference_carries_artifact_uri():
    plan = make_plan(
        "two steps",
        [
            make_step(1, "text2video_gen", "opening"),
            make_step(2, "video_extension", "continue it", ["output from 1"], [1]),
        ],
    )
    goal = Goal("two step pipeline")
    orch, hub, _ = build(goal.goal_text, plan)
    session = orch.run_task(goal)
    assert session.state == "completed"
    first_uri = session.plan.steps[0].output
    extension_call = next(
        r.call for r in session.history if r.call.tool_name == "video_extension"
    )
    assert extension_call.arguments["video"] == first_uri


def test_plan_stays_valid_between_steps():
    plan = make_plan(
        "three steps",
        [
            make_step(1, "text2video_gen", "one"),
            make_step(2, "text2video_gen", "two"),
            make_step(3, "merge_video", "merge", ["output from 1", "output from 2"], [1, 2]),
        ],
    )
    goal = Goal("three step pipeline")
    orch, hub, memory = build(goal.goal_text, plan)
    hub.open_session("probe")
    session = Session(session_id="probe", goal=goal, plan=reset(plan), state=ACTING)
    orch._sessions["probe"] = session
    while session.plan.ongoing_step() is not None:
        assert validate_plan(session.plan).valid
        orch.step_once(session)
    assert validate_plan(session.plan).valid
    assert session.plan.is_complete()


def test_provided_material_resolves_as_literal():
    plan = make_plan(
        "caption",
        [make_step(1, "vision2text_gen", "describe it", ["mock://given/clip.mp4"])],
    )
    goal = Goal("describe my clip", provided_materials=["mock://given/clip.mp4"])
    orch, hub, _ = build(goal.goal_text, plan)
    session = orch.run_task(goal)
    assert session.state == "completed"
    call = session.history[0].call
    assert call.arguments["video"] == "mock://given/clip.mp4"


def test_user_material_resolves_only_with_user_memory():
    plan = make_plan(
        "animate the cat",
        [make_step(1, "image2video_gen", "animate", ["mock://user/cat.png"])],
    )
    goal = Goal("animate my cat image")

    def run(enabled):
        hub = ToolHub()
        memory = MemoryHub(enabled=enabled)
        memory.user_store.add_material(
            UserMaterial("m1", "mock://user/cat.png", "image", ["cat"], 1)
        )
        orch = Orchestrator(hub, memory, ScriptedPlanner.for_plan(goal.goal_text, plan))
        return orch.run_task(goal, RunConfig(max_replans=0))

    assert run({"global", "user", "task"}).state == "completed"
    crippled = run({"global", "task"})
    assert crippled.state == "aborted"
    assert "unresolvable input" in crippled.plan.steps[0].output


def test_unresolved_forward_output_fails_step():
    # A reference to a step that has not produced anything must resolve to a
    # step failure, not a crash, even when validation was bypassed upstream.
    plan = make_plan(
        "bad read",
        [
            make_step(1, "video_extension", "reads ahead", ["output from 3"], []),
            make_step(2, "text2video_gen", "two"),
            make_step(3, "text2video_gen", "three"),
        ],
    )
    goal = Goal("forward read")
    orch, hub, _ = build(goal.goal_text, plan)
    hub.open_session("bad")
    session = Session(session_id="bad", goal=goal, plan=reset(plan), state=ACTING)
    orch._sessions["bad"] = session
    orch.step_once(session)
    assert session.plan.steps[0].status == FAILURE
    assert "unresolvable input" in session.plan.steps[0].output
    assert hub.trace("bad") == []  # never reached the gateway


# ---------------------------------------------------------------------------
# memoization

def test_duplicate_step_hits_memo():
    plan = make_plan(
        "same clip twice",
        [
            make_step(1, "text2video_gen", "identical prompt"),
            make_step(2, "text2video_gen", "identical prompt"),
            make_step(3, "merge_video", "merge", ["output from 1", "output from 2"], [1, 2]),
        ],
    )
    goal = Goal("duplicate steps")
    orch, hub, _ = build(goal.goal_text, plan)
    session = orch.run_task(goal)
    assert session.state == "completed"
    assert session.memo_hits == 1
    # step 2 never reached the gateway
    assert len([r for r in session.history if r.call.tool_name == "text2video_gen"]) == 1


def test_rerun_in_same_session_is_free_with_task_memory():
    plan = make_plan(
        "two clips",
        [
            make_step(1, "text2video_gen", "one"),
            make_step(2, "text2video_gen", "two"),
        ],
    )
    goal = Goal("rerun probe")
    hub = ToolHub()
    memory = MemoryHub()
    orch = Orchestrator(hub, memory, ScriptedPlanner.for_plan(goal.goal_text, plan))
    hub.open_session("s-rerun")
    session = Session(session_id="s-rerun", goal=goal, state=ACTING)
    orch._sessions["s-rerun"] = session
    run_plan_again(orch, session, reset(plan))
    first_pass = len(hub.trace("s-rerun"))
    run_plan_again(orch, session, reset(plan))
    assert len(hub.trace("s-rerun")) == first_pass
    assert session.memo_hits == 2


def test_rerun_doubles_calls_without_task_memory():
    plan = make_plan(
        "two clips",
        [
            make_step(1, "text2video_gen", "one"),
            make_step(2, "text2video_gen", "two"),
        ],
    )
    goal = Goal("rerun probe")
    hub = ToolHub()
    memory = MemoryHub(enabled={"global", "user"})
    orch = Orchestrator(hub, memory, ScriptedPlanner.for_plan(goal.goal_text, plan))
    hub.open_session("s-rerun")
    session = Session(session_id="s-rerun", goal=goal, state=ACTING)
    orch._sessions["s-rerun"] = session
    run_plan_again(orch, session, reset(plan))
    first_pass = len(hub.trace("s-rerun"))
    run_plan_again(orch, session, reset(plan))
    assert len(hub.trace("s-rerun")) == 2 * first_pass
    assert session.memo_hits == 0


# ---------------------------------------------------------------------------
# failure and re-planning

def test_injected_failure_triggers_single_replan():
    goal = Goal("one quiet street clip")
    orch, hub, _ = build(goal.goal_text, single_step_plan())
    hub.configure_failure(FailurePlan("at_call_index", 0))
    session = orch.run_task(goal)
    assert session.state == "completed"
    assert len(session.replan_events) == 1
    event = session.replan_events[0]
    assert event.failed_step == 1
    assert event.old_plan.steps[0].status == FAILURE
    assert event.new_plan.steps[0].action_description.endswith("(retry)")
    assert tool_sequence(event.old_plan) == tool_sequence(event.new_plan)


def test_prefix_preserved_across_replan():
    plan = make_plan(
        "two steps",
        [
            make_step(1, "text2video_gen", "one"),
            make_step(2, "video_extension", "two", ["output from 1"], [1]),
        ],
    )
    goal = Goal("prefix probe")
    orch, hub, _ = build(goal.goal_text, plan)
    hub.configure_failure(FailurePlan("at_call_index", 1))  # step 2's call
    session = orch.run_task(goal)
    assert session.state == "completed"
    event = session.replan_events[0]
    assert event.failed_step == 2
    assert event.new_plan.steps[:1] == event.old_plan.steps[:1]
    assert event.new_plan.steps[0].status == SUCCESS


def test_replan_budget_exhaustion_aborts():
    goal = Goal("doomed clip")
    orch, hub, _ = build(goal.goal_text, single_step_plan())
    hub.configure_failure(FailurePlan("by_tool_name", "text2video_gen"))
    session = orch.run_task(goal, RunConfig(max_replans=1))
    assert session.state == "aborted"
    assert len(session.replan_events) == 1
    assert session.plan.has_failure()


def test_reviser_touching_succeeded_prefix_is_rejected():
    plan = make_plan(
        "two steps",
        [
            make_step(1, "text2video_gen", "one"),
            make_step(2, "video_extension", "two", ["output from 1"], [1]),
        ],
    )

    def vandal(broken_plan, failed_step, error):
        out = copy_plan(broken_plan)
        out.steps[0].action_description = "rewritten history"
        out.steps[failed_step - 1].status = "ongoing"
        out.steps[failed_step - 1].output = ""
        return out

    goal = Goal("vandal probe")
    hub = ToolHub()
    policy = ScriptedPlanner.for_plan(goal.goal_text, plan)
    policy.revise_rules = [vandal]
    orch = Orchestrator(hub, MemoryHub(), policy)
    hub.configure_failure(FailurePlan("at_call_index", 1))
    with pytest.raises(PlanInvalidError):
        orch.run_task(goal)


def test_trace_step_bijection_with_replans():
    plan = make_plan(
        "three steps",
        [
            make_step(1, "text2video_gen", "one"),
            make_step(2, "text2video_gen", "two"),
            make_step(3, "merge_video", "m", ["output from 1", "output from 2"], [1, 2]),
        ],
    )
    goal = Goal("bijection probe")
    orch, hub, _ = build(goal.goal_text, plan)
    hub.configure_failure(FailurePlan("at_call_index", 1))
    session = orch.run_task(goal)
    assert session.state == "completed"
    successes = sum(1 for s in session.plan.steps if s.status == SUCCESS)
    failures = len(session.replan_events)
    assert session.gateway_attempts == (successes - session.memo_hits) + failures


def test_memo_hit_equals_forced_reinvoke():
    # Memoization soundness: the cached artifact is exactly what calling the
    # deterministic mock again would return.
    plan = make_plan(
        "same clip twice",
        [
            make_step(1, "text2video_gen", "identical prompt"),
            make_step(2, "text2video_gen", "identical prompt"),
        ],
    )
    goal = Goal("memo soundness")
    orch, hub, memory = build(goal.goal_text, plan)
    session = orch.run_task(goal)
    assert session.memo_hits == 1
    memo_uri = session.plan.steps[1].output
    hub.open_session("force")
    forced = hub.invoke_by_name(
        "text2video_gen", {"prompt": "identical prompt"}, "force", 1
    )
    assert forced.artifact.uri == memo_uri
    assert forced.artifact.metadata == hub.artifact(session.session_id, memo_uri).metadata


class _FlakyPlanner:
    """Returns garbage a configurable number of times before the real plan."""

    name = "flaky"

    def __init__(self, plan, bad_attempts: int):
        self._plan = plan
        self._bad = bad_attempts
        self.calls = 0

    def propose_plan(self, goal, context):
        self.calls += 1
        if self.calls <= self._bad:
            broken = copy_plan(self._plan)
            broken.steps[0].dependencies = [99]
            return broken
        return reset(self._plan)

    def revise_plan(self, plan, failed_step, error):
        raise AssertionError("not exercised")


def test_plan_rejection_retry_recovers_once():
    goal = Goal("flaky once")
    hub = ToolHub()
    planner = _FlakyPlanner(single_step_plan(), bad_attempts=1)
    orch = Orchestrator(hub, MemoryHub(), planner)
    session = orch.run_task(goal)
    assert session.state == "completed"
    assert planner.calls == 2


def test_plan_invalid_after_rejection_retry():
    goal = Goal("flaky forever")
    hub = ToolHub()
    planner = _FlakyPlanner(single_step_plan(), bad_attempts=2)
    orch = Orchestrator(hub, MemoryHub(), planner)
    with pytest.raises(PlanInvalidError):
        orch.run_task(goal)


def test_record_trace_requires_terminal_session():
    goal = Goal("live session")
    orch, hub, _ = build(goal.goal_text, single_step_plan())
    hub.open_session("live")
    live = Session(session_id="live", goal=goal, state=ACTING)
    with pytest.raises(SessionNotTerminalError):
        orch.record_trace(live)


def test_completed_run_lands_in_global_memory():
    goal = Goal("one quiet street clip")
    orch, hub, memory = build(goal.goal_text, single_step_plan())
    session = orch.run_task(goal, RunConfig(reference_tools=["text2video_gen"]))
    hits = memory.global_store.retrieve(goal.goal_text, 1)
    assert len(hits) == 1
    assert hits[0].tool_sequence == ["text2video_gen"]
    assert hits[0].score == 1.0


def test_determinism_same_seed_same_transcript():
    def run() -> str:
        goal = Goal("generate a 20-second story video", constraints={"total_duration_s": 20})
        hub = ToolHub()
        hub.configure_failure(FailurePlan("at_call_index", 2, seed=3))
        orch = Orchestrator(hub, MemoryHub(), ScriptedPlanner())
        session = orch.run_task(goal, RunConfig(session_id="fixed"))
        return session.transcript.render()

    assert run() == run()


# ---------------------------------------------------------------------------
# external planner adapter

class _StubHandler(BaseHTTPRequestHandler):
    responses: list[str] = []
    requests: list[dict] = []

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        self.requests.append(json.loads(self.rfile.read(length)))
        body = json.dumps({"content": self.responses.pop(0)}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_endpoint():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _StubHandler.responses = []
    _StubHandler.requests = []
    yield f"http://127.0.0.1:{server.server_port}/v1/chat"
    server.shutdown()


def test_external_planner_parses_valid_reply(stub_endpoint):
    _StubHandler.responses = [two_step_plan_text()]
    planner = ExternalPlanner(EndpointConfig(url=stub_endpoint))
    goal = Goal("two step pipeline")
    plan = planner.propose_plan(goal, __import__("planact.policies", fromlist=["PlannerContext"]).PlannerContext())
    assert plan.total_steps == 2
    assert planner.last_retries == 0
    assert _StubHandler.requests[0]["system"]


def test_external_planner_retries_once_on_prose(stub_endpoint):
    _StubHandler.responses = ["let me think about that...", two_step_plan_text()]
    planner = ExternalPlanner(EndpointConfig(url=stub_endpoint))
    from planact.policies import PlannerContext

    plan = planner.propose_plan(Goal("two step pipeline"), PlannerContext())
    assert plan.total_steps == 2
    assert planner.last_retries == 1
    # the retry message carries the parse error back to the model
    assert "not a valid plan" in _StubHandler.requests[1]["messages"][-1]["content"]


def test_external_planner_gives_up_after_two_prose_replies(stub_endpoint):
    _StubHandler.responses = ["nope", "still nope"]
    planner = ExternalPlanner(EndpointConfig(url=stub_endpoint))
    from planact.policies import PlannerContext

    with pytest.raises(PlanInvalidError):
        planner.propose_plan(Goal("two step pipeline"), PlannerContext())


def test_external_planner_endpoint_error():
    planner = ExternalPlanner(EndpointConfig(url="http://127.0.0.1:9/nope", timeout_s=0.5))
    from planact.policies import PlannerContext

    with pytest.raises(EndpointError):
        planner.propose_plan(Goal("unreachable"), PlannerContext())
