"""Planner policies: the table-driven scripted planner and the HTTP adapter.

The scripted planner makes runs hermetic: goal patterns map to plan builders,
and a rule list drives revision after failures. The default revision rule
re-emits the failed step with a "(retry)" suffix on its description, which
changes the tool arguments without touching the tool sequence.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol

from .errors import EndpointError, MalformedJson, PlanInvalidError, SchemaError
from .memory import GlobalTrace, UserMaterial
from .plan import (
    ONGOING,
    PENDING,
    Plan,
    Step,
    ToolBinding,
    copy_plan,
    parse_plan,
    reset,
)


@dataclass
class PlannerContext:
    """What memory contributed to planning: preference key=value lines, prior
    traces, and matching user materials."""

    preference_lines: list[str] = field(default_factory=list)
    traces: list[GlobalTrace] = field(default_factory=list)
    materials: list[UserMaterial] = field(default_factory=list)

    def as_text(self, goal_text: str) -> str:
        lines = [goal_text]
        lines.extend(self.preference_lines)
        for trace in self.traces:
            lines.append(f"prior plan for {trace.goal_text!r}: {' -> '.join(trace.tool_sequence)}")
        for material in self.materials:
            lines.append(f"material {material.uri} tags={','.join(material.tags)}")
        return "\n".join(lines)


class PlannerPolicy(Protocol):
    name: str

    def propose_plan(self, goal, context: PlannerContext) -> Plan: ...

    def revise_plan(self, plan: Plan, failed_step: int, error: str) -> Plan: ...


def make_step(
    number: int,
    tool: str,
    description: str,
    requirements: list[str] | None = None,
    dependencies: list[int] | None = None,
    purpose: str = "",
) -> Step:
    return Step(
        step_number=number,
        action_description=description,
        tool=ToolBinding(
            name=tool,
            purpose=purpose or description,
            input_requirements=requirements or [],
        ),
        dependencies=dependencies or [],
        status=ONGOING if number == 1 else PENDING,
        output="",
    )


def make_plan(task_analysis: str, steps: list[Step]) -> Plan:
    return Plan(task_analysis=task_analysis, total_steps=len(steps), steps=steps)


def retry_revision(plan: Plan, failed_step: int, error: str) -> Plan:
    """Re-attempt the failed step with a marker suffix; nothing else changes."""
    out = copy_plan(plan)
    step = out.steps[failed_step - 1]
    step.status = ONGOING
    step.output = ""
    step.action_description = f"{step.action_description} (retry)"
    return out


ReviseRule = Callable[[Plan, int, str], Plan | None]
BuildFn = Callable[[Any], Plan]


@dataclass
class ScriptRule:
    pattern: str  # case-insensitive substring of the goal text
    build: BuildFn


def _story_video_plan(goal) -> Plan:
    duration = int(goal.constraints.get("total_duration_s", 20))
    return make_plan(
        f"story pipeline for a {duration}s video",
        [make_step(1, "storyvideo_gen", goal.goal_text)],
    )


def _single_clip_plan(goal) -> Plan:
    return make_plan("single text-to-video call", [make_step(1, "text2video_gen", goal.goal_text)])


def default_script_rules() -> list[ScriptRule]:
    return [
        ScriptRule("story video", _story_video_plan),
        ScriptRule("clip", _single_clip_plan),
    ]


class ScriptedPlanner:
    name = "scripted"

    def __init__(
        self,
        rules: list[ScriptRule] | None = None,
        revise_rules: list[ReviseRule] | None = None,
    ):
        self.rules = list(rules) if rules is not None else default_script_rules()
        self.revise_rules = list(revise_rules or [])

    @classmethod
    def for_plan(cls, goal_text: str, plan: Plan) -> "ScriptedPlanner":
        """A planner that answers one known goal with one fixed plan."""
        template = reset(plan)
        rule = ScriptRule(goal_text, lambda goal: copy_plan(template))
        return cls(rules=[rule] + default_script_rules())

    def propose_plan(self, goal, context: PlannerContext) -> Plan:
        text = goal.goal_text.lower()
        for rule in self.rules:
            if rule.pattern.lower() in text:
                return rule.build(goal)
        raise PlanInvalidError(f"no script covers goal {goal.goal_text!r}")

    def revise_plan(self, plan: Plan, failed_step: int, error: str) -> Plan:
        for rule in self.revise_rules:
            revised = rule(plan, failed_step, error)
            if revised is not None:
                return revised
        return retry_revision(plan, failed_step, error)


DEFAULT_SYSTEM_PROMPT = (
    "You plan video-production tasks as strict JSON with the fields "
    "task_analysis and execution_plan{total_steps, steps[]}; each step has "
    "step_number, action_description, tool{name, purpose, input_requirements}, "
    "dependencies, status, output. Number steps from 1, reference earlier "
    "results as \"output from N\", mark step 1 ongoing and the rest pending, "
    "and output nothing but the JSON object."
)


@dataclass
class EndpointConfig:
    url: str
    model: str = "default"
    api_key: str = ""
    system_prompt: str = DEFAULT_SYSTEM_PROMPT
    timeout_s: float = 30.0


class ExternalPlanner:
    """Adapter for a generic chat-completion endpoint.

    POSTs {system, model, messages[]} and expects {content} back; the reply is
    parsed as plan JSON, with one retry that feeds the parse error back to the
    model.
    """

    name = "external"

    def __init__(self, config: EndpointConfig):
        self.config = config
        self.last_retries = 0

    def _post(self, messages: list[dict[str, str]]) -> str:
        payload = {
            "system": self.config.system_prompt,
            "model": self.config.model,
            "messages": messages,
        }
        request = urllib.request.Request(
            self.config.url,
            data=json.dumps(payload).encode("utf-8"),
            headers={
                "Content-Type": "application/json",
                **(
                    {"Authorization": f"Bearer {self.config.api_key}"}
                    if self.config.api_key
                    else {}
                ),
            },
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self.config.timeout_s) as response:
                body = json.loads(response.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, json.JSONDecodeError) as exc:
            raise EndpointError(f"planner endpoint failed: {exc}") from exc
        if "content" not in body:
            raise EndpointError("planner endpoint reply lacks a content field")
        return body["content"]

    def _ask(self, prompt: str) -> Plan:
        messages = [{"role": "user", "content": prompt}]
        self.last_retries = 0
        for attempt in range(2):
            reply = self._post(messages)
            try:
                return parse_plan(reply)
            except (MalformedJson, SchemaError) as exc:
                if attempt == 1:
                    raise PlanInvalidError(
                        f"endpoint reply is not a valid plan after retry: {exc}"
                    ) from exc
                self.last_retries += 1
                messages = messages + [
                    {"role": "assistant", "content": reply},
                    {
                        "role": "user",
                        "content": f"That was not a valid plan ({exc}). "
                        "Reply with only the corrected JSON plan.",
                    },
                ]
        raise AssertionError("unreachable")

    def propose_plan(self, goal, context: PlannerContext) -> Plan:
        return self._ask(context.as_text(goal.goal_text))

    def revise_plan(self, plan: Plan, failed_step: int, error: str) -> Plan:
        from .plan import serialize_plan

        prompt = (
            f"Step {failed_step} of this plan failed with: {error}\n"
            f"{serialize_plan(plan)}"
            f"Revise the plan from step {failed_step} on, keeping every earlier "
            "step and its status unchanged. Reply with only the JSON plan."
        )
        return self._ask(prompt)
