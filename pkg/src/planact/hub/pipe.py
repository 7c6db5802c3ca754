"""Subprocess transport: the same gateway contract over a newline-delimited pipe.

The child process (``python -m planact.hub.pipe``) hosts its own seeded hub and
executes calls in-process there. Each request/response is one JSON line. The
parent gateway stays the source of truth for validation, failure injection,
trace timestamps, and call-id numbering; the child reports its per-session call
counter after every invoke so both sides assign identical ids.

Workflow sub-calls run on the child, whose new trace records and storyboard
writes piggyback on the response; the parent replays them into its own trace,
so a pipe-backed hub produces byte-identical traces to an in-process one.
"""

from __future__ import annotations

import json
import subprocess
import sys

from ..storyboard import storyboard_from_json, storyboard_to_json
from .model import (
    ToolCall,
    ToolResult,
    TraceRecord,
    call_from_json,
    call_to_json,
    record_to_json,
    result_from_json,
    result_to_json,
)


class PipeTransport:
    def __init__(self, argv: list[str] | None = None):
        self._proc = subprocess.Popen(
            argv or [sys.executable, "-m", "planact.hub.pipe"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
        )

    def dispatch(self, hub, call: ToolCall, state) -> ToolResult:
        request = {"op": "invoke", "call": call_to_json(call)}
        self._proc.stdin.write(json.dumps(request, ensure_ascii=False) + "\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise RuntimeError("pipe server exited unexpectedly")
        response = json.loads(line)
        if "error" in response:
            raise RuntimeError(f"pipe server error: {response['error']}")

        for entry in response.get("storyboards", ()):
            if hub.storyboard_sink is not None:
                hub.storyboard_sink(
                    entry["session_id"],
                    entry["step_number"],
                    storyboard_from_json(entry["storyboard"]),
                )
        for raw in response.get("sub_records", ()):
            sub_call = call_from_json(raw["call"])
            sub_result = result_from_json(raw["result"])
            if sub_result.artifact is not None:
                state.artifacts.setdefault(sub_result.artifact.uri, sub_result.artifact)
            record = TraceRecord(
                timestamp=state.clock,
                session_id=sub_call.session_id,
                call=sub_call,
                result=sub_result,
            )
            state.clock += 1
            with hub._trace_lock:
                hub._trace.append(record)

        state.call_counter = int(response["session_counter"])
        result = result_from_json(response["result"])
        if result.artifact is not None:
            state.artifacts.setdefault(result.artifact.uri, result.artifact)
        return result

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.write(json.dumps({"op": "shutdown"}) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, ValueError):
                pass
            self._proc.wait(timeout=10)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def serve(stdin=None, stdout=None) -> None:
    """Run the child side of the pipe until shutdown or EOF."""
    from .gateway import ToolHub  # local import: gateway pulls in this module's peers

    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    storyboards: list[dict] = []

    def sink(session_id: str, step_number: int, sb) -> None:
        storyboards.append(
            {
                "session_id": session_id,
                "step_number": step_number,
                "storyboard": storyboard_to_json(sb),
            }
        )

    hub = ToolHub(storyboard_sink=sink)
    cursors: dict[str, int] = {}

    for line in stdin:
        if not line.strip():
            continue
        request = json.loads(line)
        if request.get("op") == "shutdown":
            break
        try:
            call = call_from_json(request["call"])
            hub.open_session(call.session_id)
            storyboards.clear()
            before = cursors.get(call.session_id, 0)
            result = hub.invoke(call)
            session_trace = hub.trace(call.session_id)
            cursors[call.session_id] = len(session_trace)
            # Everything new except the final record, which is this call itself.
            sub_records = session_trace[before:-1]
            response = {
                "result": result_to_json(result),
                "sub_records": [record_to_json(r) for r in sub_records],
                "storyboards": list(storyboards),
                "session_counter": hub._sessions[call.session_id].call_counter,
            }
        except Exception as exc:  # surfaced to the parent, which re-raises
            response = {"error": f"{type(exc).__name__}: {exc}"}
        stdout.write(json.dumps(response, ensure_ascii=False) + "\n")
        stdout.flush()


if __name__ == "__main__":
    serve()
