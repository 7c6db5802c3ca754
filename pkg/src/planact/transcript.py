"""Session transcript: an append-only JSONL event log enabling exact replay.

Event types, in the order a run emits them:

  session_start   goal, config echo, optional reference tool sequence
  memory_context  how much each memory level contributed to planning
  plan            the validated initial plan
  memo_hit        a step satisfied from task memory (no gateway call)
  storyboard_write the session's storyboard slot was written
  tool_call       one gateway trace record (workflow sub-calls included)
  advance         a step resolved and the plan stepped forward
  replan          a failure-triggered revision with old and new plans
  session_end     terminal state

Every line is canonical JSON (sorted keys), so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import CorruptTraceError
from .hub.model import TraceRecord, record_to_json
from .plan import Plan, plan_to_json
from .storyboard import Storyboard, storyboard_to_json


class TranscriptWriter:
    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self.events: list[dict[str, Any]] = []

    def emit(self, type_: str, **fields: Any) -> None:
        self.events.append({"type": type_, **fields})

    def session_start(self, session_id: str, goal: dict, config: dict,
                      reference_tools: list[str] | None, card_id: str | None) -> None:
        self.emit(
            "session_start",
            session_id=session_id,
            goal=goal,
            config=config,
            reference_tools=reference_tools,
            card_id=card_id,
        )

    def memory_context(self, traces: int, materials: int, preferences: int) -> None:
        self.emit(
            "memory_context", traces=traces, materials=materials, preferences=preferences
        )

    def plan(self, plan: Plan) -> None:
        self.emit("plan", plan=plan_to_json(plan))

    def memo_hit(self, step_number: int, tool_name: str) -> None:
        self.emit("memo_hit", step_number=step_number, tool_name=tool_name)

    def storyboard_write(self, step_number: int, sb: Storyboard) -> None:
        self.emit(
            "storyboard_write", step_number=step_number, storyboard=storyboard_to_json(sb)
        )

    def tool_call(self, record: TraceRecord) -> None:
        self.emit("tool_call", record=record_to_json(record))

    def advance(self, step_number: int, success: bool, output: str, memoized: bool) -> None:
        self.emit(
            "advance",
            step_number=step_number,
            success=success,
            output=output,
            memoized=memoized,
        )

    def replan(self, failed_step: int, old_plan: Plan, new_plan: Plan) -> None:
        self.emit(
            "replan",
            failed_step=failed_step,
            old_plan=plan_to_json(old_plan),
            new_plan=plan_to_json(new_plan),
        )

    def session_end(self, state: str) -> None:
        self.emit("session_end", state=state)

    def render(self) -> str:
        return "".join(
            json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n"
            for event in self.events
        )

    def close(self) -> None:
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(self.render(), encoding="utf-8")


def read_events(path: str | Path) -> list[dict[str, Any]]:
    """Parse a transcript file; a bad line raises CorruptTraceError with its
    1-based line number."""
    events = []
    text = Path(path).read_text(encoding="utf-8")
    for number, line in enumerate(text.split("\n"), start=1):
        if number == text.count("\n") + 1 and line == "":
            break  # trailing newline
        if not line.strip():
            raise CorruptTraceError(number, "blank line inside transcript")
        try:
            event = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptTraceError(number, f"not valid JSON: {exc.msg}") from exc
        if not isinstance(event, dict) or "type" not in event:
            raise CorruptTraceError(number, "event without a type field")
        events.append(event)
    return events
