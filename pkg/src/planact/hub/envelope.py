"""The tool-call envelope exchanged with the acting agent.

One message carries exactly one call, delimited by use_mcp_tool tags with
server_name, tool_name, and a JSON arguments body:

    <use_mcp_tool>
    <server_name>video_gen_server</server_name>
    <tool_name>generate_clip</tool_name>
    <arguments>
    {"duration": 5}
    </arguments>
    </use_mcp_tool>
"""

from __future__ import annotations

import json
import re

from ..errors import (
    MalformedArgumentsError,
    MultipleEnvelopesError,
    NoEnvelopeError,
)
from .model import ToolCall

_BLOCK = re.compile(r"<use_mcp_tool>(.*?)</use_mcp_tool>", re.DOTALL)
_SERVER = re.compile(r"<server_name>(.*?)</server_name>", re.DOTALL)
_TOOL = re.compile(r"<tool_name>(.*?)</tool_name>", re.DOTALL)
_ARGS = re.compile(r"<arguments>(.*?)</arguments>", re.DOTALL)


def parse_envelope(text: str) -> ToolCall:
    """Extract the single tool call from message text.

    Raises NoEnvelopeError / MultipleEnvelopesError when the one-tool-per-message
    rule is broken, MalformedArgumentsError when the block is incomplete or the
    arguments body is not a JSON object.
    """
    blocks = _BLOCK.findall(text)
    if not blocks:
        raise NoEnvelopeError("no use_mcp_tool block in message")
    if len(blocks) > 1:
        raise MultipleEnvelopesError(
            f"{len(blocks)} tool calls in one message; one tool per message"
        )
    body = blocks[0]

    server = _SERVER.search(body)
    tool = _TOOL.search(body)
    args = _ARGS.search(body)
    if server is None:
        raise MalformedArgumentsError("envelope is missing the server_name tag")
    if tool is None:
        raise MalformedArgumentsError("envelope is missing the tool_name tag")
    if args is None:
        raise MalformedArgumentsError("envelope is missing the arguments tag")

    try:
        arguments = json.loads(args.group(1))
    except json.JSONDecodeError as exc:
        raise MalformedArgumentsError(f"arguments body is not valid JSON: {exc}") from exc
    if not isinstance(arguments, dict):
        raise MalformedArgumentsError(
            f"arguments body must be a JSON object, got {type(arguments).__name__}"
        )

    return ToolCall(
        server_name=server.group(1).strip(),
        tool_name=tool.group(1).strip(),
        arguments=arguments,
    )


def emit_envelope(call: ToolCall) -> str:
    args = json.dumps(call.arguments, indent=2, ensure_ascii=False)
    return (
        "<use_mcp_tool>\n"
        f"<server_name>{call.server_name}</server_name>\n"
        f"<tool_name>{call.tool_name}</tool_name>\n"
        "<arguments>\n"
        f"{args}\n"
        "</arguments>\n"
        "</use_mcp_tool>"
    )
