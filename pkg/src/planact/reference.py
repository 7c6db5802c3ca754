"""Published full-scale reference results, shown in report footers.

These numbers come from runs with production LLM planners and real media
models. The bundled deterministic mocks cannot reproduce them; they are
context labels, not targets, and nothing in the test suite asserts that a
local run approaches them.
"""

from __future__ import annotations

FULL_SCALE_REFERENCE = {
    "success_rate": {"plan_act": 0.450, "single_agent": 0.200},
    "wped": {"plan_act": 0.117, "single_agent": 0.050},
    "long_video_qa_accuracy": 0.76,
    "editing": {"clip": 0.2280, "dino": 0.7488, "mllm_judge": 3.635},
    "segmentation": {"j_mean": 0.3254, "f_mean": 0.1680, "jf_mean": 0.2467},
}

REFERENCE_NOTE = (
    "Reference values above come from full-scale runs with production LLM "
    "planners and real media models; they are not reproducible with the "
    "bundled deterministic mocks and are shown for context only."
)
