"""Storyboard intermediate representation for story-video workflows.

A storyboard lists the cast, an ordered sequence of 5-second shots, and one
overall style string. ``shots_to_requests`` lowers a valid storyboard into the
generation-tool requests that realize it: one clip per shot, then a merge.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .errors import InvalidStoryboardError, MalformedJson, SchemaError
from .validation import ValidationReport

SHOT_SECONDS = 5

DISTANCES = ("wide shot", "medium shot", "close-up")
ANGLES = ("eye-level", "low angle (looking up)", "high angle (looking down)")
VIDEO_TYPES = ("text2video", "image2video", "frame2frame", "frame2frame_video_gen")

# video_type -> generation tool; both frame2frame spellings land on the same tool.
VIDEO_TYPE_TOOLS = {
    "text2video": "text2video_gen",
    "image2video": "image2video_gen",
    "frame2frame": "frame2frame_video_gen",
    "frame2frame_video_gen": "frame2frame_video_gen",
}

CHARACTER_ID = re.compile(r"^char_[1-9]\d*$")
MAX_CHARACTERS = 4  # one main plus at most three supporting

# Violation codes emitted by validate_storyboard.
DURATION_MISMATCH = "DURATION_MISMATCH"
SHOT_COUNT_MISMATCH = "SHOT_COUNT_MISMATCH"
BAD_SHOT_DURATION = "BAD_SHOT_DURATION"
BAD_SHOT_NUMBERING = "BAD_SHOT_NUMBERING"
UNKNOWN_CHARACTER = "UNKNOWN_CHARACTER"
BAD_CHARACTER_ID = "BAD_CHARACTER_ID"
DUPLICATE_CHARACTER_ID = "DUPLICATE_CHARACTER_ID"
TOO_MANY_CHARACTERS = "TOO_MANY_CHARACTERS"


@dataclass
class Character:
    id: str
    name: str
    description: str


@dataclass
class Perspective:
    distance: str
    angle: str
    lens: str | None = None


@dataclass
class Shot:
    id: int
    duration: int
    setting_description: str
    plot_correspondence: str
    onstage_characters: list[str]
    static_shot_description: str
    shot_perspective_design: Perspective
    audio_description: str
    video_type: str


@dataclass
class Storyboard:
    characters: list[Character]
    shots: list[Shot]
    style: str


@dataclass
class ToolRequest:
    tool_name: str
    arguments: dict[str, Any]


def _require(obj: dict, key: str, kind: type, path: str) -> Any:
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing field")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise SchemaError(f"{path}.{key}" if path else key, "expected integer, got boolean")
    if not isinstance(value, kind):
        raise SchemaError(
            f"{path}.{key}" if path else key,
            f"expected {kind.__name__}, got {type(value).__name__}",
        )
    return value


def _reject_extras(obj: dict, allowed: tuple[str, ...], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}" if path else key, "unknown field")


def _parse_character(obj: Any, path: str) -> Character:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected object")
    _reject_extras(obj, ("id", "name", "description"), path)
    return Character(
        id=_require(obj, "id", str, path),
        name=_require(obj, "name", str, path),
        description=_require(obj, "description", str, path),
    )


def _parse_shot(obj: Any, path: str) -> Shot:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected object")
    _reject_extras(
        obj,
        (
            "id",
            "duration",
            "setting_description",
            "plot_correspondence",
            "onstage_characters",
            "static_shot_description",
            "shot_perspective_design",
            "audio_description",
            "video_type",
        ),
        path,
    )
    onstage = _require(obj, "onstage_characters", list, path)
    for i, cid in enumerate(onstage):
        if not isinstance(cid, str):
            raise SchemaError(f"{path}.onstage_characters[{i}]", "expected character id")

    persp_obj = _require(obj, "shot_perspective_design", dict, path)
    persp_path = f"{path}.shot_perspective_design"
    _reject_extras(persp_obj, ("distance", "angle", "lens"), persp_path)
    distance = _require(persp_obj, "distance", str, persp_path)
    if distance not in DISTANCES:
        raise SchemaError(f"{persp_path}.distance", f"unknown distance {distance!r}")
    angle = _require(persp_obj, "angle", str, persp_path)
    if angle not in ANGLES:
        raise SchemaError(f"{persp_path}.angle", f"unknown angle {angle!r}")
    lens = persp_obj.get("lens")
    if lens is not None and not isinstance(lens, str):
        raise SchemaError(f"{persp_path}.lens", "expected string")

    video_type = _require(obj, "video_type", str, path)
    if video_type not in VIDEO_TYPES:
        raise SchemaError(f"{path}.video_type", f"unknown video_type {video_type!r}")

    return Shot(
        id=_require(obj, "id", int, path),
        duration=_require(obj, "duration", int, path),
        setting_description=_require(obj, "setting_description", str, path),
        plot_correspondence=_require(obj, "plot_correspondence", str, path),
        onstage_characters=list(onstage),
        static_shot_description=_require(obj, "static_shot_description", str, path),
        shot_perspective_design=Perspective(distance=distance, angle=angle, lens=lens),
        audio_description=_require(obj, "audio_description", str, path),
        video_type=video_type,
    )


def storyboard_from_json(obj: Any) -> Storyboard:
    if not isinstance(obj, dict):
        raise SchemaError("", f"expected object, got {type(obj).__name__}")
    _reject_extras(obj, ("characters", "shots", "style"), "")
    raw_chars = _require(obj, "characters", list, "")
    raw_shots = _require(obj, "shots", list, "")
    style = _require(obj, "style", str, "")
    characters = [_parse_character(c, f"characters[{i}]") for i, c in enumerate(raw_chars)]
    shots = [_parse_shot(s, f"shots[{i}]") for i, s in enumerate(raw_shots)]
    return Storyboard(characters=characters, shots=shots, style=style)


def parse_storyboard(text: str) -> Storyboard:
    """Parse storyboard JSON; exactly the three top-level fields are accepted."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from exc
    return storyboard_from_json(obj)


def storyboard_to_json(sb: Storyboard) -> dict:
    shots = []
    for shot in sb.shots:
        persp: dict[str, Any] = {
            "distance": shot.shot_perspective_design.distance,
            "angle": shot.shot_perspective_design.angle,
        }
        if shot.shot_perspective_design.lens is not None:
            persp["lens"] = shot.shot_perspective_design.lens
        shots.append(
            {
                "id": shot.id,
                "duration": shot.duration,
                "setting_description": shot.setting_description,
                "plot_correspondence": shot.plot_correspondence,
                "onstage_characters": list(shot.onstage_characters),
                "static_shot_description": shot.static_shot_description,
                "shot_perspective_design": persp,
                "audio_description": shot.audio_description,
                "video_type": shot.video_type,
            }
        )
    return {
        "characters": [
            {"id": c.id, "name": c.name, "description": c.description}
            for c in sb.characters
        ],
        "shots": shots,
        "style": sb.style,
    }


def serialize_storyboard(sb: Storyboard) -> str:
    return json.dumps(storyboard_to_json(sb), indent=2, ensure_ascii=False) + "\n"


def validate_storyboard(sb: Storyboard, total_duration: int) -> ValidationReport:
    """Check shot timing against the requested total plus all id invariants."""
    report = ValidationReport()

    seen_ids: set[str] = set()
    for character in sb.characters:
        if not CHARACTER_ID.match(character.id):
            report.add(BAD_CHARACTER_ID, f"character id {character.id!r} is not char_<n>")
        if character.id in seen_ids:
            report.add(DUPLICATE_CHARACTER_ID, f"character id {character.id!r} repeats")
        seen_ids.add(character.id)
    if len(sb.characters) > MAX_CHARACTERS:
        report.add(
            TOO_MANY_CHARACTERS,
            f"{len(sb.characters)} characters exceed the 1 main + 3 supporting bound",
        )

    for position, shot in enumerate(sb.shots, start=1):
        if shot.id != position:
            report.add(
                BAD_SHOT_NUMBERING,
                f"shot at position {position} is numbered {shot.id}",
                position,
            )
        if shot.duration != SHOT_SECONDS:
            report.add(
                BAD_SHOT_DURATION,
                f"shot {shot.id} lasts {shot.duration}s, every shot lasts {SHOT_SECONDS}s",
                position,
            )
        for cid in shot.onstage_characters:
            if cid not in seen_ids:
                report.add(
                    UNKNOWN_CHARACTER,
                    f"shot {shot.id} stages unknown character {cid!r}",
                    position,
                )

    total = sum(shot.duration for shot in sb.shots)
    if total != total_duration:
        report.add(
            DURATION_MISMATCH,
            f"shots sum to {total}s but the video is {total_duration}s",
        )
    if len(sb.shots) * SHOT_SECONDS != total_duration:
        report.add(
            SHOT_COUNT_MISMATCH,
            f"{total_duration}s needs {total_duration // SHOT_SECONDS} shots, "
            f"got {len(sb.shots)}",
        )
    return report


def shot_prompt(shot: Shot, style: str) -> str:
    # Composition order: static frame first, then the action, then the style tag.
    return f"{shot.static_shot_description} {shot.plot_correspondence} Style: {style}"


def shots_to_requests(sb: Storyboard) -> list[ToolRequest]:
    """Lower a storyboard to generation requests: one per shot, then one merge.

    Raises InvalidStoryboardError when the storyboard does not validate against
    its own implied duration (5s per shot), or has no shots at all.
    """
    report = validate_storyboard(sb, SHOT_SECONDS * len(sb.shots))
    if not sb.shots:
        report.add(SHOT_COUNT_MISMATCH, "a storyboard needs at least one shot")
    if not report.valid:
        raise InvalidStoryboardError(report.violations)

    requests = [
        ToolRequest(
            tool_name=VIDEO_TYPE_TOOLS[shot.video_type],
            arguments={"prompt": shot_prompt(shot, sb.style)},
        )
        for shot in sb.shots
    ]
    requests.append(
        ToolRequest(
            tool_name="merge_video",
            arguments={"clips": [f"output from shot {shot.id}" for shot in sb.shots]},
        )
    )
    return requests
