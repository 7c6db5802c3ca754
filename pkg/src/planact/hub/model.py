"""Wire types for the tool gateway: descriptors, calls, results, trace records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

ATOM = "atom"
WORKFLOW = "workflow"
KINDS = (ATOM, WORKFLOW)

CATEGORIES = (
    "video_generation",
    "video_editing",
    "video_understanding",
    "video_tracking",
    "audio",
    "image",
    "non_ai",
)

ARTIFACT_KINDS = ("video", "image", "audio", "text", "mask", "storyboard")

# Semantic parameter types. Media types carry artifact URIs; list types carry
# lists of URIs.
PARAM_TYPES = (
    "text",
    "int",
    "video",
    "image",
    "audio",
    "mask",
    "storyboard",
    "video_list",
    "image_list",
    "audio_list",
)


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str
    required: bool = True


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    server_name: str
    kind: str
    category: str
    params: tuple[ParamSpec, ...]
    produces: str
    # Workflow descriptors declare their constituent atoms in call order.
    expansion: tuple[str, ...] = ()


@dataclass
class ToolCall:
    server_name: str
    tool_name: str
    arguments: dict[str, Any]
    session_id: str = ""
    call_id: str = ""
    step_number: int = 0


@dataclass
class Provenance:
    session_id: str
    step_number: int
    tool_name: str
    call_id: str


@dataclass
class Artifact:
    uri: str
    kind: str
    metadata: dict[str, Any]
    provenance: Provenance


@dataclass
class ToolResult:
    call_id: str
    status: str  # "ok" | "failed"
    artifact: Artifact | None = None
    error_message: str | None = None
    latency_ms: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class TraceRecord:
    timestamp: int  # logical clock, monotonically nondecreasing per session
    session_id: str
    call: ToolCall
    result: ToolResult


@dataclass(frozen=True)
class FailurePlan:
    mode: str  # "at_call_index" | "by_tool_name" | "probability"
    value: Any
    seed: int = 0


# ---------------------------------------------------------------------------
# JSON forms (trace files, catalog export, pipe transport)

def descriptor_to_json(d: ToolDescriptor) -> dict:
    return {
        "name": d.name,
        "server_name": d.server_name,
        "kind": d.kind,
        "category": d.category,
        "params": [
            {"name": p.name, "type": p.type, "required": p.required} for p in d.params
        ],
        "produces": d.produces,
        "expansion": list(d.expansion),
    }


def descriptor_from_json(obj: dict) -> ToolDescriptor:
    return ToolDescriptor(
        name=obj["name"],
        server_name=obj["server_name"],
        kind=obj["kind"],
        category=obj["category"],
        params=tuple(
            ParamSpec(p["name"], p["type"], p["required"]) for p in obj["params"]
        ),
        produces=obj["produces"],
        expansion=tuple(obj.get("expansion", ())),
    )


def call_to_json(call: ToolCall) -> dict:
    return {
        "server_name": call.server_name,
        "tool_name": call.tool_name,
        "arguments": call.arguments,
        "session_id": call.session_id,
        "call_id": call.call_id,
        "step_number": call.step_number,
    }


def call_from_json(obj: dict) -> ToolCall:
    return ToolCall(
        server_name=obj["server_name"],
        tool_name=obj["tool_name"],
        arguments=obj["arguments"],
        session_id=obj.get("session_id", ""),
        call_id=obj.get("call_id", ""),
        step_number=obj.get("step_number", 0),
    )


def artifact_to_json(a: Artifact) -> dict:
    return {
        "uri": a.uri,
        "kind": a.kind,
        "metadata": a.metadata,
        "provenance": {
            "session_id": a.provenance.session_id,
            "step_number": a.provenance.step_number,
            "tool_name": a.provenance.tool_name,
            "call_id": a.provenance.call_id,
        },
    }


def artifact_from_json(obj: dict) -> Artifact:
    prov = obj["provenance"]
    return Artifact(
        uri=obj["uri"],
        kind=obj["kind"],
        metadata=obj["metadata"],
        provenance=Provenance(
            session_id=prov["session_id"],
            step_number=prov["step_number"],
            tool_name=prov["tool_name"],
            call_id=prov["call_id"],
        ),
    )


def result_to_json(r: ToolResult) -> dict:
    return {
        "call_id": r.call_id,
        "status": r.status,
        "artifact": artifact_to_json(r.artifact) if r.artifact else None,
        "error_message": r.error_message,
        "latency_ms": r.latency_ms,
    }


def result_from_json(obj: dict) -> ToolResult:
    return ToolResult(
        call_id=obj["call_id"],
        status=obj["status"],
        artifact=artifact_from_json(obj["artifact"]) if obj.get("artifact") else None,
        error_message=obj.get("error_message"),
        latency_ms=obj.get("latency_ms", 0),
    )


def record_to_json(rec: TraceRecord) -> dict:
    return {
        "timestamp": rec.timestamp,
        "session_id": rec.session_id,
        "call": call_to_json(rec.call),
        "result": result_to_json(rec.result),
    }


def record_from_json(obj: dict) -> TraceRecord:
    return TraceRecord(
        timestamp=obj["timestamp"],
        session_id=obj["session_id"],
        call=call_from_json(obj["call"]),
        result=result_from_json(obj["result"]),
    )
