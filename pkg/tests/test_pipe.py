from __future__ import annotations

import json

import pytest

from planact.hub import PipeTransport, ToolCall, ToolHub
from planact.hub.model import record_to_json


def drive(hub: ToolHub) -> list[dict]:
    hub.open_session("s1")
    calls = [
        ("text2video_gen", {"prompt": "an alley at dusk"}),
        ("storyvideo_gen", {"prompt": "a tiny fable", "total_duration_s": 10}),
        ("speech_gen", {"prompt": "narration line"}),
    ]
    for tool, arguments in calls:
        descriptor = hub.registry.find(tool)
        result = hub.invoke(
            ToolCall(
                server_name=descriptor.server_name,
                tool_name=tool,
                arguments=arguments,
                session_id="s1",
                step_number=1,
            )
        )
        assert result.ok, result.error_message
    return [record_to_json(r) for r in hub.trace("s1")]


@pytest.fixture(scope="module")
def pipe():
    transport = PipeTransport()
    yield transport
    transport.close()


def test_pipe_matches_in_process_byte_for_byte(pipe):
    local = drive(ToolHub())
    remote = drive(ToolHub(transport=pipe))
    assert json.dumps(remote, sort_keys=True) == json.dumps(local, sort_keys=True)


def test_pipe_reports_storyboard_writes(pipe):
    boards = []
    hub = ToolHub(transport=pipe, storyboard_sink=lambda sid, step, sb: boards.append((sid, step, sb)))
    hub.open_session("sb")
    descriptor = hub.registry.find("storyvideo_gen")
    result = hub.invoke(
        ToolCall(
            server_name=descriptor.server_name,
            tool_name="storyvideo_gen",
            arguments={"prompt": "another fable", "total_duration_s": 15},
            session_id="sb",
            step_number=2,
        )
    )
    assert result.ok
    assert len(boards) == 1
    session_id, step_number, board = boards[0]
    assert (session_id, step_number) == ("sb", 2)
    assert len(board.shots) == 3


def test_pipe_sub_artifacts_are_queryable(pipe):
    hub = ToolHub(transport=pipe)
    hub.open_session("q")
    descriptor = hub.registry.find("storyvideo_gen")
    result = hub.invoke(
        ToolCall(
            server_name=descriptor.server_name,
            tool_name="storyvideo_gen",
            arguments={"prompt": "query fable", "total_duration_s": 10},
            session_id="q",
        )
    )
    merged_uri = result.artifact.metadata["final_clip"]
    assert hub.artifact("q", merged_uri) is not None
