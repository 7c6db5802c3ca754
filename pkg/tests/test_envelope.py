from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planact.errors import (
    MalformedArgumentsError,
    MultipleEnvelopesError,
    NoEnvelopeError,
)
from planact.hub import ToolCall, emit_envelope, parse_envelope

CLIP_MESSAGE = """\
I will generate the clip now.

<use_mcp_tool>
<server_name>video_gen_server</server_name>
<tool_name>generate_clip</tool_name>
<arguments>
{
  "duration": 5,
  "style": "Modern Flat",
  "scene_description": "City street at night with neon lights flashing"
}
</arguments>
</use_mcp_tool>
"""


def test_parse_clip_message():
    call = parse_envelope(CLIP_MESSAGE)
    assert call.server_name == "video_gen_server"
    assert call.tool_name == "generate_clip"
    assert call.arguments["duration"] == 5
    assert call.arguments["style"] == "Modern Flat"


def test_no_envelope():
    with pytest.raises(NoEnvelopeError):
        parse_envelope("just thinking out loud, no call yet")


def test_two_envelopes_rejected():
    with pytest.raises(MultipleEnvelopesError):
        parse_envelope(CLIP_MESSAGE + "\n" + CLIP_MESSAGE)


def test_bad_arguments_json():
    text = CLIP_MESSAGE.replace('"duration": 5,', '"duration": 5,,')
    with pytest.raises(MalformedArgumentsError):
        parse_envelope(text)


def test_arguments_must_be_object():
    text = (
        "<use_mcp_tool>\n<server_name>s</server_name>\n<tool_name>t</tool_name>\n"
        "<arguments>\n[1, 2]\n</arguments>\n</use_mcp_tool>"
    )
    with pytest.raises(MalformedArgumentsError):
        parse_envelope(text)


def test_missing_tool_name_tag():
    text = (
        "<use_mcp_tool>\n<server_name>s</server_name>\n"
        "<arguments>\n{}\n</arguments>\n</use_mcp_tool>"
    )
    with pytest.raises(MalformedArgumentsError) as exc:
        parse_envelope(text)
    assert "tool_name" in str(exc.value)


json_values = st.recursive(
    st.none()
    | st.booleans()
    | st.integers(min_value=-1000, max_value=1000)
    | st.text(
        alphabet=st.characters(blacklist_characters="<>", blacklist_categories=("Cs",)),
        max_size=12,
    ),
    lambda children: st.lists(children, max_size=3)
    | st.dictionaries(st.text(max_size=6), children, max_size=3),
    max_leaves=12,
)


@settings(max_examples=150, deadline=None)
@given(arguments=st.dictionaries(st.text(min_size=1, max_size=8), json_values, max_size=4))
def test_nested_arguments_round_trip(arguments):
    call = ToolCall(server_name="srv", tool_name="tool", arguments=arguments)
    parsed = parse_envelope(emit_envelope(call))
    assert parsed.server_name == "srv"
    assert parsed.tool_name == "tool"
    assert parsed.arguments == arguments
