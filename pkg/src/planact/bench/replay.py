"""Reconstruct a session purely from its transcript and re-derive its metrics."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import CorruptTraceError, NotOngoingError, SchemaError
from ..hub.model import record_from_json
from ..memory import ABORTED, COMPLETED
from ..metrics import MetricReport
from ..orchestrator import ACTING, Goal, ReplanEvent, Session
from ..plan import StepOutcome, advance, plan_from_json
from .suite import session_metrics


@dataclass
class ReplayedSession:
    session: Session
    reference_tools: list[str] | None = None
    card_id: str | None = None
    config: dict | None = None

    def metrics(self) -> MetricReport:
        return session_metrics(self.session, self.reference_tools)


def replay(trace_file: str | Path) -> ReplayedSession:
    """Rebuild session state by applying transcript events in order.

    Nothing is re-invoked; the plan is stepped through the recorded advance and
    replan events, so replayed metrics match the live run exactly. An empty
    file yields an empty session still in the planning state.
    """
    from ..transcript import read_events

    events = read_events(trace_file)
    session = Session(session_id="", goal=Goal("(empty transcript)"))
    replayed = ReplayedSession(session=session)

    for line_number, event in enumerate(events, start=1):
        kind = event["type"]
        try:
            if kind == "session_start":
                session.session_id = event["session_id"]
                session.goal = Goal.from_json(event["goal"])
                replayed.reference_tools = event.get("reference_tools")
                replayed.card_id = event.get("card_id")
                replayed.config = event.get("config")
            elif kind == "memory_context":
                session.trace_retrievals = event["traces"]
            elif kind == "plan":
                session.plan = plan_from_json(event["plan"])
                session.state = ACTING
            elif kind == "memo_hit":
                session.memo_hits += 1
            elif kind == "storyboard_write":
                session.storyboard_writes += 1
            elif kind == "tool_call":
                session.history.append(record_from_json(event["record"]))
            elif kind == "advance":
                session.plan = advance(
                    session.plan,
                    StepOutcome(
                        event["step_number"], event["success"], event["output"]
                    ),
                )
                if not event["memoized"]:
                    session.gateway_attempts += 1
            elif kind == "replan":
                old_plan = plan_from_json(event["old_plan"])
                new_plan = plan_from_json(event["new_plan"])
                session.replan_events.append(
                    ReplanEvent(event["failed_step"], old_plan, new_plan)
                )
                session.plan = new_plan
            elif kind == "session_end":
                state = event["state"]
                if state not in (COMPLETED, ABORTED):
                    raise CorruptTraceError(line_number, f"bad terminal state {state!r}")
                session.state = state
            else:
                raise CorruptTraceError(line_number, f"unknown event type {kind!r}")
        except CorruptTraceError:
            raise
        except (KeyError, TypeError, AttributeError, SchemaError, NotOngoingError) as exc:
            raise CorruptTraceError(
                line_number, f"inconsistent {kind} event: {exc}"
            ) from exc
    return replayed
