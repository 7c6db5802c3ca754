"""MCP-style tool gateway: catalog, envelopes, mock servers, trace log."""

from .envelope import emit_envelope, parse_envelope
from .gateway import ToolHub, read_trace, validate_arguments
from .model import (
    ARTIFACT_KINDS,
    ATOM,
    CATEGORIES,
    WORKFLOW,
    Artifact,
    FailurePlan,
    ParamSpec,
    Provenance,
    ToolCall,
    ToolDescriptor,
    ToolResult,
    TraceRecord,
)
from .pipe import PipeTransport
from .registry import ToolRegistry
from .servers import MockToolFailure, mock_answer, seed_descriptors, synth_storyboard

__all__ = [
    "ARTIFACT_KINDS",
    "ATOM",
    "CATEGORIES",
    "WORKFLOW",
    "Artifact",
    "FailurePlan",
    "MockToolFailure",
    "ParamSpec",
    "PipeTransport",
    "Provenance",
    "ToolCall",
    "ToolDescriptor",
    "ToolHub",
    "ToolRegistry",
    "ToolResult",
    "TraceRecord",
    "emit_envelope",
    "mock_answer",
    "parse_envelope",
    "read_trace",
    "seed_descriptors",
    "synth_storyboard",
    "validate_arguments",
]
