"""Deterministic mock tool servers and the seed catalog.

Every mock returns an artifact whose URI is a digest of (tool name, canonical
arguments), so identical calls yield identical artifacts and results are
memoizable. No media is produced; metadata carries what downstream steps need
(durations, answers, digests of the driving prompt).
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Callable

from ..canon import short_digest
from ..storyboard import (
    Character,
    Perspective,
    Shot,
    Storyboard,
    shots_to_requests,
)
from .model import ATOM, WORKFLOW, Artifact, ParamSpec, ToolCall, ToolDescriptor

if TYPE_CHECKING:
    from .gateway import ToolHub


class MockToolFailure(Exception):
    """A mock server rejecting a call; surfaces as a failed ToolResult."""


Handler = Callable[["ToolHub", ToolCall, ToolDescriptor], Artifact]

CLIP_SECONDS = 5


def _duration_of(hub: ToolHub, session_id: str, uri: Any) -> int:
    artifact = hub.artifact(session_id, uri) if isinstance(uri, str) else None
    if artifact is None:
        return CLIP_SECONDS
    return int(artifact.metadata.get("duration_s", CLIP_SECONDS))


def _clip(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    return hub.make_artifact(
        call,
        kind="video",
        metadata={
            "duration_s": CLIP_SECONDS,
            "prompt_digest": short_digest(call.arguments.get("prompt", "")),
        },
    )


def _extended_clip(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    base = _duration_of(hub, call.session_id, call.arguments["video"])
    return hub.make_artifact(
        call,
        kind="video",
        metadata={
            "duration_s": base + CLIP_SECONDS,
            "prompt_digest": short_digest(call.arguments.get("prompt", "")),
        },
    )


def _edited_clip(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    base = _duration_of(hub, call.session_id, call.arguments["video"])
    return hub.make_artifact(
        call,
        kind="video",
        metadata={
            "duration_s": base,
            "edit": d.name,
            "prompt_digest": short_digest(call.arguments.get("prompt", "")),
        },
    )


def _image(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    return hub.make_artifact(
        call,
        kind="image",
        metadata={"prompt_digest": short_digest(call.arguments.get("prompt", ""))},
    )


def _audio(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    return hub.make_artifact(
        call,
        kind="audio",
        metadata={"duration_s": CLIP_SECONDS},
    )


def _mask(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    return hub.make_artifact(
        call,
        kind="mask",
        metadata={"source": call.arguments["video"]},
    )


def mock_answer(tool_name: str, question: str, subject: str) -> str:
    """The canned answer a mock analysis tool gives; fixtures reuse this."""
    return f"ans-{short_digest([tool_name, question, subject], 10)}"


def _analysis(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    question = str(call.arguments.get("prompt", call.arguments.get("label", "")))
    subject = str(call.arguments.get("video", call.arguments.get("audio", "")))
    return hub.make_artifact(
        call,
        kind="text",
        metadata={"answer": mock_answer(d.name, question, subject)},
    )


def _stock_clip(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    return hub.make_artifact(
        call,
        kind="video",
        metadata={
            "duration_s": CLIP_SECONDS,
            "query_digest": short_digest(call.arguments["query"]),
        },
    )


def _merged(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    clips = call.arguments["clips"]
    if not clips:
        raise MockToolFailure("merge_video needs at least one clip")
    total = sum(_duration_of(hub, call.session_id, clip) for clip in clips)
    return hub.make_artifact(
        call,
        kind="video",
        metadata={"duration_s": total, "clip_count": len(clips)},
    )


def _with_transition(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    clips = call.arguments["clips"]
    total = sum(_duration_of(hub, call.session_id, clip) for clip in clips)
    return hub.make_artifact(
        call,
        kind="video",
        metadata={
            "duration_s": total,
            "transition": call.arguments.get("transition", "fade"),
        },
    )


def _subtitled(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    base = _duration_of(hub, call.session_id, call.arguments["video"])
    return hub.make_artifact(call, kind="video", metadata={"duration_s": base})


# ---------------------------------------------------------------------------
# Workflows

def synth_storyboard(prompt: str, total_duration_s: int) -> Storyboard:
    """Deterministic stand-in for LLM storyboard authorship."""
    if total_duration_s <= 0 or total_duration_s % CLIP_SECONDS:
        raise MockToolFailure(
            f"total_duration_s must be a positive multiple of {CLIP_SECONDS}, "
            f"got {total_duration_s}"
        )
    shot_count = total_duration_s // CLIP_SECONDS
    tag = short_digest(prompt, 8)
    character = Character(
        id="char_1",
        name="main character",
        description=f"this main character is the lead figure of scene {tag}",
    )
    shots = [
        Shot(
            id=i,
            duration=CLIP_SECONDS,
            setting_description=f"scene {tag}, moment {i} of {shot_count}",
            plot_correspondence=f"this main character carries the story beat {i}",
            onstage_characters=["char_1"],
            static_shot_description=f"this main character holds frame {i} of scene {tag}",
            shot_perspective_design=Perspective(distance="medium shot", angle="eye-level"),
            audio_description="ambient room tone",
            video_type="text2video",
        )
        for i in range(1, shot_count + 1)
    ]
    return Storyboard(characters=[character], shots=shots, style=f"mock house style {tag}")


def _run_storyboard_workflow(
    hub: ToolHub,
    call: ToolCall,
    sb: Storyboard,
    shot_args: Callable[[int], dict[str, Any]] | None = None,
) -> str:
    """Write the storyboard, generate every shot, merge. Returns the merge URI."""
    hub.write_storyboard(call, sb)
    requests = shots_to_requests(sb)
    clip_uris: list[str] = []
    for index, request in enumerate(requests[:-1]):
        arguments = dict(request.arguments)
        if shot_args is not None:
            arguments.update(shot_args(index))
        result = hub.invoke_by_name(
            request.tool_name, arguments, call.session_id, call.step_number
        )
        if not result.ok or result.artifact is None:
            raise MockToolFailure(
                f"{request.tool_name} failed inside {call.tool_name}: "
                f"{result.error_message}"
            )
        clip_uris.append(result.artifact.uri)
    merge = hub.invoke_by_name(
        "merge_video", {"clips": clip_uris}, call.session_id, call.step_number
    )
    if not merge.ok:
        raise MockToolFailure(f"merge_video failed inside {call.tool_name}")
    return merge.artifact.uri


def _story_video(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    total = int(call.arguments.get("total_duration_s", 20))
    sb = synth_storyboard(call.arguments["prompt"], total)
    merged = _run_storyboard_workflow(hub, call, sb)
    return hub.make_artifact(
        call,
        kind="video",
        metadata={"duration_s": total, "shots": len(sb.shots), "final_clip": merged},
    )


def _entity_video(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    total = int(call.arguments.get("total_duration_s", 20))
    images = call.arguments["character_images"]
    if not images:
        raise MockToolFailure("entity2video needs at least one character image")
    sb = synth_storyboard(call.arguments["prompt"], total)
    # Provided character images stand in for generated ones; shots condition on
    # them round-robin instead of text alone.
    for shot in sb.shots:
        shot.video_type = "image2video"
    merged = _run_storyboard_workflow(
        hub, call, sb, shot_args=lambda index: {"image": images[index % len(images)]}
    )
    return hub.make_artifact(
        call,
        kind="video",
        metadata={"duration_s": total, "shots": len(sb.shots), "final_clip": merged},
    )


def _long_video_understanding(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    result = hub.invoke_by_name(
        "vision2text_gen",
        {
            "prompt": call.arguments.get("prompt", "describe the video"),
            "video": call.arguments["video"],
        },
        call.session_id,
        call.step_number,
    )
    if not result.ok or result.artifact is None:
        raise MockToolFailure(
            f"vision2text_gen failed inside longvideo_understanding: "
            f"{result.error_message}"
        )
    return hub.make_artifact(
        call,
        kind="text",
        metadata={"answer": result.artifact.metadata["answer"]},
    )


def _voice_clone(hub: ToolHub, call: ToolCall, d: ToolDescriptor) -> Artifact:
    samples = call.arguments["samples"]
    if not samples:
        raise MockToolFailure("voice_clone needs at least one sample")
    result = hub.invoke_by_name(
        "speech_gen",
        {"prompt": f"voice profile {short_digest(samples, 8)}"},
        call.session_id,
        call.step_number,
    )
    if not result.ok:
        raise MockToolFailure("speech_gen failed inside voice_clone")
    return hub.make_artifact(
        call,
        kind="audio",
        metadata={"profile": short_digest(samples, 8)},
    )


# ---------------------------------------------------------------------------
# Seed catalog

def _p(name: str, type_: str, required: bool = True) -> ParamSpec:
    return ParamSpec(name, type_, required)


def _tool(
    name: str,
    server: str,
    category: str,
    params: list[ParamSpec],
    produces: str,
    kind: str = ATOM,
    expansion: tuple[str, ...] = (),
) -> ToolDescriptor:
    return ToolDescriptor(
        name=name,
        server_name=server,
        kind=kind,
        category=category,
        params=tuple(params),
        produces=produces,
        expansion=expansion,
    )


def seed_descriptors() -> list[ToolDescriptor]:
    """Every built-in tool, atoms before workflows."""
    gen = "video_gen_server"
    edit = "video_edit_server"
    understand = "video_understand_server"
    track = "video_track_server"
    audio = "audio_server"
    image = "image_server"
    cut = "cut_server"
    return [
        _tool("text2video_gen", gen, "video_generation", [_p("prompt", "text")], "video"),
        _tool(
            "image2video_gen",
            gen,
            "video_generation",
            [_p("prompt", "text"), _p("image", "image")],
            "video",
        ),
        _tool(
            "video_extension",
            gen,
            "video_generation",
            [_p("prompt", "text"), _p("video", "video")],
            "video",
        ),
        _tool(
            "frame2frame_video_gen",
            gen,
            "video_generation",
            [_p("prompt", "text"), _p("first_frame", "image"), _p("last_frame", "image")],
            "video",
        ),
        _tool(
            "swap_object_tool",
            edit,
            "video_editing",
            [_p("prompt", "text"), _p("video", "video"), _p("reference_image", "image")],
            "video",
        ),
        _tool(
            "repainting",
            edit,
            "video_editing",
            [_p("prompt", "text"), _p("video", "video"), _p("label", "text")],
            "video",
        ),
        _tool(
            "depth_modify",
            edit,
            "video_editing",
            [_p("prompt", "text"), _p("video", "video")],
            "video",
        ),
        _tool(
            "recolor",
            edit,
            "video_editing",
            [_p("prompt", "text"), _p("video", "video")],
            "video",
        ),
        _tool(
            "pose_reference",
            edit,
            "video_editing",
            [_p("prompt", "text"), _p("video", "video")],
            "video",
        ),
        _tool(
            "style_transfer",
            edit,
            "video_editing",
            [_p("prompt", "text"), _p("video", "video")],
            "video",
        ),
        _tool(
            "vision2text_gen",
            understand,
            "video_understanding",
            [_p("prompt", "text"), _p("video", "video")],
            "text",
        ),
        _tool(
            "video_timestamp_analysis",
            understand,
            "video_understanding",
            [_p("video", "video"), _p("timestamp_s", "int")],
            "text",
        ),
        _tool(
            "main_object_analysis",
            understand,
            "video_understanding",
            [_p("video", "video"), _p("label", "text")],
            "text",
        ),
        _tool(
            "referring_segmentation",
            track,
            "video_tracking",
            [_p("prompt", "text"), _p("video", "video")],
            "mask",
        ),
        _tool(
            "video_all_segmentation",
            track,
            "video_tracking",
            [_p("video", "video")],
            "mask",
        ),
        _tool(
            "video_foley",
            audio,
            "audio",
            [_p("video", "video"), _p("prompt", "text", required=False)],
            "audio",
        ),
        _tool("speech_gen", audio, "audio", [_p("prompt", "text")], "audio"),
        _tool("speech_to_text", audio, "audio", [_p("audio", "audio")], "text"),
        _tool("music_gen", audio, "audio", [_p("prompt", "text")], "audio"),
        _tool("text2image_generate", image, "image", [_p("prompt", "text")], "image"),
        _tool(
            "image2image_generate",
            image,
            "image",
            [_p("prompt", "text"), _p("image", "image")],
            "image",
        ),
        _tool(
            "image_editing",
            image,
            "image",
            [_p("prompt", "text"), _p("image", "image")],
            "image",
        ),
        _tool("merge_video", cut, "non_ai", [_p("clips", "video_list")], "video"),
        _tool(
            "add_transition",
            cut,
            "non_ai",
            [_p("clips", "video_list"), _p("transition", "text", required=False)],
            "video",
        ),
        _tool(
            "add_subtitle",
            cut,
            "non_ai",
            [_p("video", "video"), _p("subtitles", "text")],
            "video",
        ),
        _tool("materials_search", cut, "non_ai", [_p("query", "text")], "video"),
        # Workflows last; their expansions must already be registered.
        _tool(
            "storyvideo_gen",
            gen,
            "video_generation",
            [_p("prompt", "text"), _p("total_duration_s", "int", required=False)],
            "video",
            kind=WORKFLOW,
            expansion=("text2video_gen", "merge_video"),
        ),
        _tool(
            "entity2video",
            gen,
            "video_generation",
            [
                _p("prompt", "text"),
                _p("character_images", "image_list"),
                _p("total_duration_s", "int", required=False),
            ],
            "video",
            kind=WORKFLOW,
            expansion=("image2video_gen", "merge_video"),
        ),
        _tool(
            "longvideo_understanding",
            understand,
            "video_understanding",
            [_p("video", "video"), _p("prompt", "text", required=False)],
            "text",
            kind=WORKFLOW,
            expansion=("vision2text_gen",),
        ),
        _tool(
            "voice_clone",
            audio,
            "audio",
            [_p("samples", "audio_list")],
            "audio",
            kind=WORKFLOW,
            expansion=("speech_gen",),
        ),
    ]


HANDLERS: dict[str, Handler] = {
    "text2video_gen": _clip,
    "image2video_gen": _clip,
    "video_extension": _extended_clip,
    "frame2frame_video_gen": _clip,
    "swap_object_tool": _edited_clip,
    "repainting": _edited_clip,
    "depth_modify": _edited_clip,
    "recolor": _edited_clip,
    "pose_reference": _edited_clip,
    "style_transfer": _edited_clip,
    "vision2text_gen": _analysis,
    "video_timestamp_analysis": _analysis,
    "main_object_analysis": _analysis,
    "referring_segmentation": _mask,
    "video_all_segmentation": _mask,
    "video_foley": _audio,
    "speech_gen": _audio,
    "speech_to_text": _analysis,
    "music_gen": _audio,
    "text2image_generate": _image,
    "image2image_generate": _image,
    "image_editing": _image,
    "merge_video": _merged,
    "add_transition": _with_transition,
    "add_subtitle": _subtitled,
    "materials_search": _stock_clip,
    "storyvideo_gen": _story_video,
    "entity2video": _entity_video,
    "longvideo_understanding": _long_video_understanding,
    "voice_clone": _voice_clone,
}
