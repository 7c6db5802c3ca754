"""The gateway between the acting agent and the tool servers.

Validates calls against the registered schemas, dispatches to the owning mock
server (in-process by default, or over a subprocess pipe transport), injects
configured failures, and appends one trace record per call regardless of
outcome. Timestamps are a per-session logical clock so traces are byte-stable
across runs.
"""

from __future__ import annotations

import json
import random
import threading
from copy import deepcopy
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

from ..canon import short_digest
from ..errors import SchemaViolationError, UnknownSessionError
from ..storyboard import Storyboard
from .model import (
    Artifact,
    FailurePlan,
    Provenance,
    ToolCall,
    ToolDescriptor,
    ToolResult,
    TraceRecord,
    record_from_json,
    record_to_json,
)
from .registry import ToolRegistry
from .servers import HANDLERS, MockToolFailure, seed_descriptors

StoryboardSink = Callable[[str, int, Storyboard], None]

_PY_TYPES = {
    "text": str,
    "int": int,
    "video": str,
    "image": str,
    "audio": str,
    "mask": str,
    "storyboard": str,
}


@dataclass
class _SessionState:
    call_counter: int = 0
    clock: int = 0
    artifacts: dict[str, Artifact] = field(default_factory=dict)
    lock: threading.RLock = field(default_factory=threading.RLock)


def validate_arguments(descriptor: ToolDescriptor, arguments: dict[str, Any]) -> None:
    known = {p.name for p in descriptor.params}
    for key in arguments:
        if key not in known:
            raise SchemaViolationError(key, f"unknown argument for {descriptor.name}")
    for param in descriptor.params:
        if param.name not in arguments:
            if param.required:
                raise SchemaViolationError(param.name, "required argument missing")
            continue
        value = arguments[param.name]
        if param.type.endswith("_list"):
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise SchemaViolationError(param.name, "expected a list of URIs")
        else:
            expected = _PY_TYPES[param.type]
            if isinstance(value, bool) or not isinstance(value, expected):
                raise SchemaViolationError(
                    param.name, f"expected {param.type}, got {type(value).__name__}"
                )


class ToolHub:
    """Catalog plus dispatch plus trace log; one instance per run."""

    def __init__(
        self,
        registry: ToolRegistry | None = None,
        transport=None,
        storyboard_sink: StoryboardSink | None = None,
        seed_catalog: bool = True,
    ):
        self.registry = registry or ToolRegistry()
        if registry is None and seed_catalog:
            for descriptor in seed_descriptors():
                self.registry.register(descriptor)
        self._transport = transport
        self.storyboard_sink = storyboard_sink
        self._sessions: dict[str, _SessionState] = {}
        self._trace: list[TraceRecord] = []
        self._trace_lock = threading.Lock()
        self._failure: FailurePlan | None = None
        self._failure_rng = random.Random(0)

    # -- sessions -----------------------------------------------------------

    def open_session(self, session_id: str) -> None:
        if session_id not in self._sessions:
            self._sessions[session_id] = _SessionState()

    def session_exists(self, session_id: str) -> bool:
        return session_id in self._sessions

    def artifact(self, session_id: str, uri: str) -> Artifact | None:
        state = self._sessions.get(session_id)
        if state is None:
            return None
        return state.artifacts.get(uri)

    # -- catalog ------------------------------------------------------------

    def register(self, descriptor: ToolDescriptor) -> None:
        self.registry.register(descriptor)

    def catalog(self, category: str | None = None) -> list[ToolDescriptor]:
        return self.registry.list(category)

    # -- failure injection ----------------------------------------------------

    def configure_failure(self, plan: FailurePlan | None) -> None:
        if plan is not None and plan.mode not in (
            "at_call_index",
            "by_tool_name",
            "probability",
        ):
            raise ValueError(f"unknown failure mode {plan.mode!r}")
        self._failure = plan
        self._failure_rng = random.Random(plan.seed if plan else 0)

    def _injected_failure(self, index: int, call: ToolCall) -> bool:
        plan = self._failure
        if plan is None:
            return False
        if plan.mode == "at_call_index":
            return index == int(plan.value)
        if plan.mode == "by_tool_name":
            return call.tool_name == plan.value
        return self._failure_rng.random() < float(plan.value)

    # -- invocation -----------------------------------------------------------

    def make_artifact(self, call: ToolCall, kind: str, metadata: dict[str, Any]) -> Artifact:
        uri = f"mock://{kind}/{short_digest([call.tool_name, call.arguments])}"
        return Artifact(
            uri=uri,
            kind=kind,
            metadata=metadata,
            provenance=Provenance(
                session_id=call.session_id,
                step_number=call.step_number,
                tool_name=call.tool_name,
                call_id=call.call_id,
            ),
        )

    def write_storyboard(self, call: ToolCall, sb: Storyboard) -> None:
        if self.storyboard_sink is not None:
            self.storyboard_sink(call.session_id, call.step_number, sb)

    def invoke_by_name(
        self, tool_name: str, arguments: dict[str, Any], session_id: str, step_number: int
    ) -> ToolResult:
        descriptor = self.registry.find(tool_name)
        return self.invoke(
            ToolCall(
                server_name=descriptor.server_name,
                tool_name=tool_name,
                arguments=arguments,
                session_id=session_id,
                step_number=step_number,
            )
        )

    def invoke(self, call: ToolCall) -> ToolResult:
        """Validate, dispatch, trace. Injected and mock-level failures come back
        as failed results; unknown tools and schema violations raise."""
        descriptor = self.registry.get(call.server_name, call.tool_name)
        state = self._sessions.get(call.session_id)
        if state is None:
            raise UnknownSessionError(call.session_id or "<empty>")
        validate_arguments(descriptor, call.arguments)

        with state.lock:  # calls within a session are strictly serialized
            index = state.call_counter
            state.call_counter += 1
            # Snapshot the arguments so later caller-side mutation cannot
            # falsify the trace.
            call = replace(
                call,
                call_id=call.call_id or f"call-{index:04d}",
                arguments=deepcopy(call.arguments),
            )

            latency = int(short_digest([call.tool_name, call.arguments], 4), 16) % 380 + 20
            if self._injected_failure(index, call):
                result = ToolResult(
                    call_id=call.call_id,
                    status="failed",
                    error_message=f"server unavailable (injected) for {call.tool_name}",
                    latency_ms=latency,
                )
            else:
                result = self._dispatch(call, descriptor, state, latency)

            record = TraceRecord(
                timestamp=state.clock,
                session_id=call.session_id,
                call=call,
                result=result,
            )
            state.clock += 1
            with self._trace_lock:
                self._trace.append(record)
        return result

    def _dispatch(
        self, call: ToolCall, descriptor: ToolDescriptor, state: _SessionState, latency: int
    ) -> ToolResult:
        if self._transport is not None:
            return self._transport.dispatch(self, call, state)
        handler = HANDLERS.get(call.tool_name)
        if handler is None:
            return ToolResult(
                call_id=call.call_id,
                status="failed",
                error_message=f"no mock server behavior for {call.tool_name}",
                latency_ms=latency,
            )
        try:
            artifact = handler(self, call, descriptor)
        except MockToolFailure as exc:
            return ToolResult(
                call_id=call.call_id,
                status="failed",
                error_message=str(exc),
                latency_ms=latency,
            )
        # First producer wins: identical calls map to the same URI, and the
        # stored artifact keeps its original provenance.
        state.artifacts.setdefault(artifact.uri, artifact)
        return ToolResult(
            call_id=call.call_id, status="ok", artifact=artifact, latency_ms=latency
        )

    # -- trace ----------------------------------------------------------------

    def trace(self, session_id: str | None = None) -> list[TraceRecord]:
        with self._trace_lock:
            records = list(self._trace)
        if session_id is None:
            return records
        return [r for r in records if r.session_id == session_id]

    def write_trace(self, path: str | Path, session_id: str | None = None) -> None:
        lines = [
            json.dumps(record_to_json(r), ensure_ascii=False, sort_keys=True)
            for r in self.trace(session_id)
        ]
        Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_trace(path: str | Path) -> list[TraceRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(record_from_json(json.loads(line)))
    return records
