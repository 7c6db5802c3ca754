from __future__ import annotations

import json
from pathlib import Path

import pytest

from planact.policies import make_plan, make_step

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def two_step_plan_json() -> dict:
    """Plan in the exact wire shape the planner emits, fresh lifecycle."""
    return {
        "task_analysis": "turn the idea into one clip and extend it",
        "execution_plan": {
            "total_steps": 2,
            "steps": [
                {
                    "step_number": 1,
                    "action_description": "generate the opening clip",
                    "tool": {
                        "name": "text2video_gen",
                        "purpose": "create the base footage",
                        "input_requirements": [],
                    },
                    "dependencies": [],
                    "status": "ongoing",
                    "output": "",
                },
                {
                    "step_number": 2,
                    "action_description": "extend the clip with a closing beat",
                    "tool": {
                        "name": "video_extension",
                        "purpose": "lengthen the footage",
                        "input_requirements": ["output from 1"],
                    },
                    "dependencies": [1],
                    "status": "pending",
                    "output": "",
                },
            ],
        },
    }


def two_step_plan_text() -> str:
    return json.dumps(two_step_plan_json(), indent=2)


def story_pipeline_plan():
    """3-step pipeline: keyframe image, animate it, merge."""
    return make_plan(
        "storyboard-first pipeline",
        [
            make_step(1, "text2image_generate", "draw the keyframe"),
            make_step(2, "image2video_gen", "animate the keyframe", ["output from 1"], [1]),
            make_step(3, "merge_video", "merge the clips", ["output from 2"], [2]),
        ],
    )


@pytest.fixture
def tmp_out(tmp_path: Path) -> Path:
    out = tmp_path / "out"
    out.mkdir()
    return out
