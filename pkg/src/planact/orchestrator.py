"""The Plan-Act loop: propose a plan, execute one ongoing step at a time over
the tool gateway, revise on failure, and export the session transcript.

One session is one strictly sequential loop; distinct sessions may run
concurrently because each owns its task memory and the gateway serializes
per-session calls.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .canon import short_digest
from .errors import (
    PlanInvalidError,
    ReplanBudgetExhaustedError,
    SchemaViolationError,
    SessionNotTerminalError,
    UnknownToolError,
    UnresolvableInputError,
)
from .hub.gateway import ToolHub
from .hub.model import ToolCall, TraceRecord
from .memory import ABORTED, COMPLETED, MemoryHub
from .metrics import wped
from .plan import (
    FAILURE,
    SUCCESS,
    Plan,
    Step,
    StepOutcome,
    advance,
    step_reference,
    validate_plan,
)
from .policies import PlannerContext, PlannerPolicy
from .storyboard import Storyboard
from .transcript import TranscriptWriter

PLANNING = "planning"
ACTING = "acting"
REPLANNING = "replanning"


@dataclass
class Goal:
    goal_text: str
    provided_materials: list[str] = field(default_factory=list)
    constraints: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.goal_text:
            raise ValueError("goal_text must be non-empty")

    def to_json(self) -> dict:
        return {
            "goal_text": self.goal_text,
            "provided_materials": list(self.provided_materials),
            "constraints": dict(self.constraints),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Goal":
        return cls(
            goal_text=obj["goal_text"],
            provided_materials=list(obj.get("provided_materials", [])),
            constraints=dict(obj.get("constraints", {})),
        )


@dataclass
class ReplanEvent:
    failed_step: int
    old_plan: Plan
    new_plan: Plan


@dataclass
class RunConfig:
    max_replans: int = 3
    retrieval_k: int = 3
    session_id: str | None = None
    transcript_path: str | Path | None = None
    reference_tools: list[str] | None = None
    card_id: str | None = None
    config_echo: dict[str, Any] = field(default_factory=dict)


@dataclass
class Session:
    session_id: str
    goal: Goal
    plan: Plan | None = None
    history: list[TraceRecord] = field(default_factory=list)
    state: str = PLANNING
    replan_events: list[ReplanEvent] = field(default_factory=list)
    memo_hits: int = 0
    trace_retrievals: int = 0
    storyboard_writes: int = 0
    gateway_attempts: int = 0  # step-initiated calls, workflow sub-calls excluded
    transcript: TranscriptWriter = field(default_factory=TranscriptWriter)
    _trace_cursor: int = 0

    @property
    def terminal(self) -> bool:
        return self.state in (COMPLETED, ABORTED)

    def executed_tools(self) -> list[str]:
        if self.plan is None:
            return []
        return [s.tool.name for s in self.plan.steps if s.status == SUCCESS]


class Orchestrator:
    def __init__(self, hub: ToolHub, memory: MemoryHub, policy: PlannerPolicy):
        self.hub = hub
        self.memory = memory
        self.policy = policy
        self._sessions: dict[str, Session] = {}
        hub.storyboard_sink = self._on_storyboard

    # -- storyboard slot -----------------------------------------------------

    def _on_storyboard(self, session_id: str, step_number: int, sb: Storyboard) -> None:
        self.memory.task(session_id).write_storyboard(sb)
        session = self._sessions.get(session_id)
        if session is not None:
            session.storyboard_writes += 1
            session.transcript.storyboard_write(step_number, sb)

    # -- lifecycle -------------------------------------------------------------

    def run_task(self, goal: Goal, config: RunConfig | None = None) -> Session:
        config = config or RunConfig()
        session_id = config.session_id or f"s-{short_digest(goal.goal_text, 10)}"
        session = Session(
            session_id=session_id,
            goal=goal,
            transcript=TranscriptWriter(config.transcript_path),
        )
        self._sessions[session_id] = session
        self.hub.open_session(session_id)
        session.transcript.session_start(
            session_id=session_id,
            goal=goal.to_json(),
            config={
                "max_replans": config.max_replans,
                "memory": sorted(self.memory.enabled),
                "planner": getattr(self.policy, "name", "unknown"),
                **config.config_echo,
            },
            reference_tools=config.reference_tools,
            card_id=config.card_id,
        )

        session.plan = self._plan_phase(session, config)
        session.state = ACTING
        self._act_loop(session, config)
        return session

    def _plan_phase(self, session: Session, config: RunConfig) -> Plan:
        goal = session.goal
        context = PlannerContext(
            preference_lines=(
                self.memory.user_store.preference_lines()
                if "user" in self.memory.enabled
                else []
            ),
            traces=self.memory.global_retrieve(goal.goal_text, config.retrieval_k),
            materials=self.memory.user_retrieve(goal.goal_text, config.retrieval_k),
        )
        session.trace_retrievals = len(context.traces)
        session.transcript.memory_context(
            traces=len(context.traces),
            materials=len(context.materials),
            preferences=len(context.preference_lines),
        )

        plan = self.policy.propose_plan(goal, context)
        report = validate_plan(plan)
        if not report.valid:
            # One rejection-retry before giving up on the policy.
            plan = self.policy.propose_plan(goal, context)
            report = validate_plan(plan)
            if not report.valid:
                raise PlanInvalidError(
                    "policy produced an invalid plan twice", report.violations
                )
        session.transcript.plan(plan)
        return plan

    def _act_loop(self, session: Session, config: RunConfig) -> None:
        while True:
            plan = session.plan
            if plan.is_complete():
                self._finalize(session, COMPLETED, config)
                return
            if plan.ongoing_step() is not None:
                self.step_once(session)
                continue
            if plan.has_failure():
                failed = next(s.step_number for s in plan.steps if s.status == FAILURE)
                session.state = REPLANNING
                try:
                    self.replan(session, failed, config)
                except ReplanBudgetExhaustedError:
                    self._finalize(session, ABORTED, config)
                    return
                continue
            # No ongoing step, no failure, pending steps remain: a stalled
            # plan. validate_plan would flag it; treat as abort.
            self._finalize(session, ABORTED, config)
            return

    # -- acting -----------------------------------------------------------------

    def _resolve_requirements(self, session: Session, step: Step) -> list[str]:
        task = self.memory.task(session.session_id)
        known = set(session.goal.provided_materials)
        if "user" in self.memory.enabled:
            known |= self.memory.user_store.material_uris()
        resolved = []
        for requirement in step.tool.input_requirements:
            ref = step_reference(requirement)
            if ref is not None:
                artifact = task.step_outputs.get(ref)
                if artifact is None:
                    raise UnresolvableInputError(
                        f"output from {ref} is not available yet"
                    )
                resolved.append(artifact.uri)
            elif requirement in known:
                resolved.append(requirement)
            else:
                raise UnresolvableInputError(
                    f"{requirement!r} is neither a step reference nor a known material"
                )
        return resolved


    def _build_arguments(
        self, session: Session, step: Step, resolved: list[str]
    ) -> dict[str, Any]:
        descriptor = self.hub.registry.find(step.tool.name)
        queue = deque(resolved)
        arguments: dict[str, Any] = {}
        for param in descriptor.params:
            if param.type == "text":
                arguments[param.name] = step.action_description
            elif param.type == "int":
                if param.name in session.goal.constraints:
                    arguments[param.name] = int(session.goal.constraints[param.name])
            elif param.type.endswith("_list"):
                if queue:
                    arguments[param.name] = list(queue)
                    queue.clear()
            else:  # a single media input
                if queue:
                    arguments[param.name] = queue.popleft()
        return arguments

    def step_once(self, session: Session) -> Session:
        """Execute exactly the ongoing step: resolve inputs, check the memo,
        invoke on a miss, then advance the plan."""
        step = session.plan.ongoing_step()
        if step is None:
            raise PlanInvalidError("step_once called with no ongoing step")
        task = self.memory.task(session.session_id)

        try:
            resolved = self._resolve_requirements(session, step)
            arguments = self._build_arguments(session, step, resolved)
        except UnresolvableInputError as exc:
            return self._resolve_step(session, step, False, f"unresolvable input: {exc}")
        except UnknownToolError as exc:
            return self._resolve_step(session, step, False, f"unknown tool: {exc}")

        memo = self.memory.memo_lookup(session.session_id, step.tool.name, arguments)
        if memo is not None:
            session.memo_hits += 1
            session.transcript.memo_hit(step.step_number, step.tool.name)
            task.record_step_output(step.step_number, memo)
            return self._resolve_step(
                session, step, True, memo.uri, memoized=True
            )

        descriptor = self.hub.registry.find(step.tool.name)
        call = ToolCall(
            server_name=descriptor.server_name,
            tool_name=step.tool.name,
            arguments=arguments,
            session_id=session.session_id,
            step_number=step.step_number,
        )
        try:
            session.gateway_attempts += 1
            result = self.hub.invoke(call)
        except SchemaViolationError as exc:
            self._sync_trace(session)
            return self._resolve_step(session, step, False, f"schema violation: {exc}")
        self._sync_trace(session)

        if result.ok and result.artifact is not None:
            self.memory.memo_store(
                session.session_id, step.tool.name, arguments, result.artifact
            )
            task.record_step_output(step.step_number, result.artifact)
            return self._resolve_step(session, step, True, result.artifact.uri)
        return self._resolve_step(
            session, step, False, result.error_message or "tool call failed"
        )

    def _sync_trace(self, session: Session) -> None:
        records = self.hub.trace(session.session_id)
        for record in records[session._trace_cursor :]:
            session.history.append(record)
            session.transcript.tool_call(record)
        session._trace_cursor = len(records)

    def _resolve_step(
        self,
        session: Session,
        step: Step,
        success: bool,
        output: str,
        memoized: bool = False,
    ) -> Session:
        outcome = StepOutcome(step.step_number, success, output or "(no output)")
        session.plan = advance(session.plan, outcome)
        session.transcript.advance(step.step_number, success, outcome.output, memoized)
        return session

    # -- re-planning ---------------------------------------------------------------

    def replan(self, session: Session, failed_step: int, config: RunConfig) -> Session:
        if len(session.replan_events) >= config.max_replans:
            raise ReplanBudgetExhaustedError(
                f"{config.max_replans} replans already used"
            )
        old_plan = session.plan
        error = old_plan.steps[failed_step - 1].output
        new_plan = self.policy.revise_plan(old_plan, failed_step, error)

        report = validate_plan(new_plan)
        if not report.valid:
            raise PlanInvalidError("revised plan is invalid", report.violations)
        if new_plan.steps[: failed_step - 1] != old_plan.steps[: failed_step - 1]:
            raise PlanInvalidError(
                f"revision touched steps before the failed step {failed_step}"
            )
        if any(s.status == SUCCESS for s in new_plan.steps[failed_step - 1 :]):
            raise PlanInvalidError("revision marked an unexecuted step as success")

        session.replan_events.append(ReplanEvent(failed_step, old_plan, new_plan))
        session.transcript.replan(failed_step, old_plan, new_plan)
        session.plan = new_plan
        session.state = ACTING
        return session

    # -- completion -----------------------------------------------------------------

    def _finalize(self, session: Session, state: str, config: RunConfig) -> None:
        session.state = state
        self.record_trace(session, config.reference_tools)
        session.transcript.session_end(state)
        session.transcript.close()

    def record_trace(
        self, session: Session, reference_tools: list[str] | None = None
    ) -> None:
        """Export the session into global memory; only terminal sessions may
        be recorded."""
        if not session.terminal:
            raise SessionNotTerminalError(
                f"session {session.session_id} is still {session.state}"
            )
        executed = session.executed_tools()
        score = wped(executed, reference_tools) if reference_tools else None
        self.memory.record_trace(
            session.session_id,
            session.goal.goal_text,
            executed,
            COMPLETED if session.state == COMPLETED else ABORTED,
            score=score,
        )


def run_plan_again(orchestrator: Orchestrator, session: Session, plan: Plan) -> Session:
    """Re-execute a plan inside an existing (non-finalized) session.

    Used to probe memoization: with task memory on, a second pass over the same
    plan resolves every step from memos and issues zero gateway calls.
    """
    session.plan = plan
    while session.plan.ongoing_step() is not None:
        orchestrator.step_once(session)
    return session
