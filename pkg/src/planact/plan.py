"""The plan structure exchanged between planner and actor.

A plan is a numbered list of steps, each bound to one tool, with backward-only
dependencies and a four-state lifecycle (pending / ongoing / success / failure).
Execution is strictly sequential: at most one step is ongoing at a time, and a
pending step may only become ongoing once every dependency has succeeded.

Everything here is a pure value: ``advance`` returns a new plan rather than
mutating its input, so plans can be shared read-only across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .errors import MalformedJson, NotOngoingError, SchemaError
from .validation import ValidationReport

PENDING = "pending"
ONGOING = "ongoing"
SUCCESS = "success"
FAILURE = "failure"
STATUSES = (PENDING, ONGOING, SUCCESS, FAILURE)

# Violation codes emitted by validate_plan.
COUNT_MISMATCH = "COUNT_MISMATCH"
BAD_NUMBERING = "BAD_NUMBERING"
BAD_STATUS = "BAD_STATUS"
MULTIPLE_ONGOING = "MULTIPLE_ONGOING"
NO_ONGOING = "NO_ONGOING"
FORWARD_DEPENDENCY = "FORWARD_DEPENDENCY"
UNSATISFIED_DEPENDENCY = "UNSATISFIED_DEPENDENCY"
UNBOUND_REFERENCE = "UNBOUND_REFERENCE"
OUTPUT_MISMATCH = "OUTPUT_MISMATCH"

STEP_REFERENCE = re.compile(r"^output from (\d+)$", re.IGNORECASE)


@dataclass
class ToolBinding:
    name: str
    purpose: str
    input_requirements: list[str] = field(default_factory=list)


@dataclass
class Step:
    step_number: int
    action_description: str
    tool: ToolBinding
    dependencies: list[int] = field(default_factory=list)
    status: str = PENDING
    output: str = ""


@dataclass
class Plan:
    task_analysis: str
    total_steps: int
    steps: list[Step] = field(default_factory=list)

    def ongoing_step(self) -> Step | None:
        for step in self.steps:
            if step.status == ONGOING:
                return step
        return None

    def is_complete(self) -> bool:
        return all(step.status == SUCCESS for step in self.steps)

    def has_failure(self) -> bool:
        return any(step.status == FAILURE for step in self.steps)


@dataclass
class StepOutcome:
    step_number: int
    success: bool
    output: str


def step_reference(requirement: str) -> int | None:
    """Return N when the requirement is an "output from N" reference, else None."""
    match = STEP_REFERENCE.match(requirement.strip())
    return int(match.group(1)) if match else None


# ---------------------------------------------------------------------------
# Parsing (strict: unknown keys are planner drift and get rejected)

def _require(obj: dict, key: str, kind: type, path: str) -> Any:
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing field")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise SchemaError(f"{path}.{key}" if path else key, "expected integer, got boolean")
    if not isinstance(value, kind):
        raise SchemaError(
            f"{path}.{key}" if path else key,
            f"expected {kind.__name__}, got {type(value).__name__}",
        )
    return value


def _reject_extras(obj: dict, allowed: tuple[str, ...], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}" if path else key, "unknown field")


def _parse_step(obj: Any, path: str) -> Step:
    if not isinstance(obj, dict):
        raise SchemaError(path, f"expected object, got {type(obj).__name__}")
    _reject_extras(
        obj,
        ("step_number", "action_description", "tool", "dependencies", "status", "output"),
        path,
    )
    number = _require(obj, "step_number", int, path)
    if number < 1:
        raise SchemaError(f"{path}.step_number", "must be >= 1")
    description = _require(obj, "action_description", str, path)

    tool_obj = _require(obj, "tool", dict, path)
    tool_path = f"{path}.tool"
    _reject_extras(tool_obj, ("name", "purpose", "input_requirements"), tool_path)
    name = _require(tool_obj, "name", str, tool_path)
    purpose = _require(tool_obj, "purpose", str, tool_path)
    reqs = _require(tool_obj, "input_requirements", list, tool_path)
    for i, req in enumerate(reqs):
        if not isinstance(req, str):
            raise SchemaError(f"{tool_path}.input_requirements[{i}]", "expected string")

    deps = _require(obj, "dependencies", list, path)
    for i, dep in enumerate(deps):
        if isinstance(dep, bool) or not isinstance(dep, int):
            raise SchemaError(f"{path}.dependencies[{i}]", "expected step number")

    status = _require(obj, "status", str, path)
    if status not in STATUSES:
        raise SchemaError(f"{path}.status", f"unknown status {status!r}")
    output = _require(obj, "output", str, path)

    return Step(
        step_number=number,
        action_description=description,
        tool=ToolBinding(name=name, purpose=purpose, input_requirements=list(reqs)),
        dependencies=list(deps),
        status=status,
        output=output,
    )


def plan_from_json(obj: Any) -> Plan:
    if not isinstance(obj, dict):
        raise SchemaError("", f"expected object, got {type(obj).__name__}")
    _reject_extras(obj, ("task_analysis", "execution_plan"), "")
    analysis = _require(obj, "task_analysis", str, "")
    execution = _require(obj, "execution_plan", dict, "")
    _reject_extras(execution, ("total_steps", "steps"), "execution_plan")
    total = _require(execution, "total_steps", int, "execution_plan")
    if total < 0:
        raise SchemaError("execution_plan.total_steps", "must be >= 0")
    raw_steps = _require(execution, "steps", list, "execution_plan")
    steps = [
        _parse_step(raw, f"execution_plan.steps[{i}]") for i, raw in enumerate(raw_steps)
    ]
    if total != len(steps):
        raise SchemaError(
            "execution_plan.total_steps",
            f"declares {total} steps but {len(steps)} are listed",
        )
    return Plan(task_analysis=analysis, total_steps=total, steps=steps)


def parse_plan(text: str) -> Plan:
    """Parse plan JSON text; unknown fields anywhere are rejected."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from exc
    return plan_from_json(obj)


# ---------------------------------------------------------------------------
# Canonical serialization (key order fixed; parse∘serialize is the identity)

def plan_to_json(plan: Plan) -> dict:
    return {
        "task_analysis": plan.task_analysis,
        "execution_plan": {
            "total_steps": plan.total_steps,
            "steps": [
                {
                    "step_number": step.step_number,
                    "action_description": step.action_description,
                    "tool": {
                        "name": step.tool.name,
                        "purpose": step.tool.purpose,
                        "input_requirements": list(step.tool.input_requirements),
                    },
                    "dependencies": list(step.dependencies),
                    "status": step.status,
                    "output": step.output,
                }
                for step in plan.steps
            ],
        },
    }


def serialize_plan(plan: Plan) -> str:
    return json.dumps(plan_to_json(plan), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Validation

def validate_plan(plan: Plan) -> ValidationReport:
    """Check every structural invariant; returns violations without mutating."""
    report = ValidationReport()

    if plan.total_steps != len(plan.steps):
        report.add(
            COUNT_MISMATCH,
            f"total_steps={plan.total_steps} but {len(plan.steps)} steps listed",
        )
    for position, step in enumerate(plan.steps, start=1):
        if step.step_number != position:
            report.add(
                BAD_NUMBERING,
                f"step at position {position} is numbered {step.step_number}",
                step.step_number,
            )
        if step.status not in STATUSES:
            report.add(BAD_STATUS, f"unknown status {step.status!r}", step.step_number)

    ongoing = [s for s in plan.steps if s.status == ONGOING]
    if len(ongoing) > 1:
        report.add(
            MULTIPLE_ONGOING,
            f"steps {[s.step_number for s in ongoing]} are all ongoing",
        )
    pending = any(s.status == PENDING for s in plan.steps)
    if not ongoing and pending and not plan.has_failure():
        report.add(NO_ONGOING, "pending steps remain but none is ongoing")

    status_of = {s.step_number: s.status for s in plan.steps}
    for step in plan.steps:
        for dep in step.dependencies:
            if dep >= step.step_number or dep < 1:
                report.add(
                    FORWARD_DEPENDENCY,
                    f"step {step.step_number} depends on step {dep}",
                    step.step_number,
                )
        if step.status == ONGOING and any(
            status_of.get(dep) != SUCCESS
            for dep in step.dependencies
            if 1 <= dep < step.step_number
        ):
            report.add(
                UNSATISFIED_DEPENDENCY,
                f"step {step.step_number} is ongoing with unfinished dependencies",
                step.step_number,
            )
        for requirement in step.tool.input_requirements:
            ref = step_reference(requirement)
            if ref is not None and ref not in step.dependencies:
                report.add(
                    UNBOUND_REFERENCE,
                    f"step {step.step_number} reads output from {ref} "
                    "without declaring the dependency",
                    step.step_number,
                )
        terminal = step.status in (SUCCESS, FAILURE)
        if terminal and step.output == "":
            report.add(
                OUTPUT_MISMATCH,
                f"step {step.step_number} is {step.status} with empty output",
                step.step_number,
            )
        if not terminal and step.output != "":
            report.add(
                OUTPUT_MISMATCH,
                f"step {step.step_number} is {step.status} but carries output",
                step.step_number,
            )
    return report


# ---------------------------------------------------------------------------
# Lifecycle

def _copy_step(step: Step) -> Step:
    return Step(
        step_number=step.step_number,
        action_description=step.action_description,
        tool=ToolBinding(
            name=step.tool.name,
            purpose=step.tool.purpose,
            input_requirements=list(step.tool.input_requirements),
        ),
        dependencies=list(step.dependencies),
        status=step.status,
        output=step.output,
    )


def copy_plan(plan: Plan) -> Plan:
    return Plan(
        task_analysis=plan.task_analysis,
        total_steps=plan.total_steps,
        steps=[_copy_step(s) for s in plan.steps],
    )


def reset(plan: Plan) -> Plan:
    """Return the plan in its fresh state: step 1 ongoing, the rest pending."""
    out = copy_plan(plan)
    for step in out.steps:
        step.status = ONGOING if step.step_number == 1 else PENDING
        step.output = ""
    return out


def advance(plan: Plan, result: StepOutcome) -> Plan:
    """Resolve the ongoing step and, on success, promote the next runnable one.

    On failure nothing is promoted; deciding whether to re-plan or abort is the
    orchestrator's job.
    """
    current = plan.ongoing_step()
    if current is None or current.step_number != result.step_number:
        raise NotOngoingError(
            f"step {result.step_number} is not the ongoing step"
        )
    out = copy_plan(plan)
    resolved = out.steps[result.step_number - 1]
    resolved.status = SUCCESS if result.success else FAILURE
    resolved.output = result.output

    if result.success:
        done = {s.step_number for s in out.steps if s.status == SUCCESS}
        for step in out.steps:
            if step.status == PENDING and all(d in done for d in step.dependencies):
                step.status = ONGOING
                break
    return out


def tool_sequence(plan: Plan) -> list[str]:
    """The tool names in step order — the projection the edit-distance metrics use."""
    return [step.tool.name for step in plan.steps]
