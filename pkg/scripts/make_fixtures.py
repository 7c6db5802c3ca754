#!/usr/bin/env python3
"""Regenerate the synthetic goal-card fixtures and the golden files.

The 50-card probing set under fixtures/cards/ is synthetic: goals, reference
plans, failure specs, and QA items are generated here, shaped to exercise every
part of the harness (single calls, chained steps, edits, story workflows,
user-material lookups, duplicate steps for memoization, QA probes). QA gold
answers are computed from the deterministic mock answerer so that the designed
fraction of them (38 of 50) matches, pinning suite-level QA accuracy at 0.76.

Run from the repository root:

    python scripts/make_fixtures.py
"""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from planact.bench.cards import GoalCard, QaItem, save_card
from planact.bench.report import write_outputs
from planact.bench.suite import SuiteConfig, run_suite
from planact.hub.model import FailurePlan
from planact.hub.servers import mock_answer
from planact.orchestrator import Goal
from planact.policies import make_plan, make_step

SUBJECTS = [
    "a paper boat on a rainy street",
    "a lighthouse in rolling fog",
    "a street musician at dawn",
    "a fox crossing a snowy field",
    "a kite stuck in a pine tree",
    "a tram gliding through rain",
    "a baker dusting flour",
    "a tide pool at low sun",
    "a windmill over lavender",
    "a night market in the rain",
]

QA_VIDEOS = ["mock://user/source_a.mp4", "mock://user/source_b.mp4"]


def solo_cards() -> list[GoalCard]:
    cards = []
    for i, subject in enumerate(SUBJECTS):
        goal = Goal(f"make a short clip of {subject}")
        plan = make_plan(
            "single generation call",
            [make_step(1, "text2video_gen", f"generate a clip of {subject}")],
        )
        cards.append(
            GoalCard(
                card_id=f"card-{i:03d}",
                goal=goal,
                reference_plan=plan,
                failure_spec=FailurePlan("at_call_index", 0, seed=i),
            )
        )
    return cards


def extend_cards(start: int) -> list[GoalCard]:
    cards = []
    for i in range(8):
        subject = SUBJECTS[i]
        goal = Goal(f"make a clip of {subject} then continue it")
        plan = make_plan(
            "generate then extend",
            [
                make_step(1, "text2video_gen", f"generate a clip of {subject}"),
                make_step(
                    2, "video_extension", "continue the scene", ["output from 1"], [1]
                ),
            ],
        )
        cards.append(
            GoalCard(
                card_id=f"card-{start + i:03d}",
                goal=goal,
                reference_plan=plan,
                failure_spec=FailurePlan("at_call_index", i % 2, seed=start + i),
            )
        )
    return cards


def edit_cards(start: int) -> list[GoalCard]:
    cards = []
    edits = ["repainting", "recolor", "style_transfer", "depth_modify"]
    for i in range(8):
        subject = SUBJECTS[i + 2]
        edit = edits[i % len(edits)]
        goal = Goal(f"make a clip of {subject} and then rework it with {edit}")
        plan = make_plan(
            "generate then edit",
            [
                make_step(1, "text2video_gen", f"generate a clip of {subject}"),
                make_step(2, edit, f"rework the clip ({edit})", ["output from 1"], [1]),
            ],
        )
        cards.append(
            GoalCard(
                card_id=f"card-{start + i:03d}",
                goal=goal,
                reference_plan=plan,
                failure_spec=FailurePlan("at_call_index", i % 2, seed=start + i),
            )
        )
    return cards


def story_cards(start: int) -> list[GoalCard]:
    cards = []
    for i in range(5):
        subject = SUBJECTS[i + 4]
        goal = Goal(
            f"generate a 20-second story video about {subject}",
            constraints={"total_duration_s": 20},
        )
        plan = make_plan(
            "story workflow",
            [make_step(1, "storyvideo_gen", goal.goal_text)],
        )
        cards.append(
            GoalCard(
                card_id=f"card-{start + i:03d}",
                goal=goal,
                reference_plan=plan,
                failure_spec=FailurePlan("at_call_index", (0, 2)[i % 2], seed=start + i),
            )
        )
    return cards


def user_material_cards(start: int) -> list[GoalCard]:
    cards = []
    pets = ["cat", "dog"]
    for i in range(5):
        pet = pets[i % 2]
        goal = Goal(f"animate my {pet} picture into a clip, variant {i}")
        plan = make_plan(
            "animate a stored material",
            [
                make_step(
                    1,
                    "image2video_gen",
                    f"animate the {pet} picture, variant {i}",
                    [f"mock://user/{pet}.png"],
                )
            ],
        )
        cards.append(
            GoalCard(
                card_id=f"card-{start + i:03d}",
                goal=goal,
                reference_plan=plan,
                failure_spec=FailurePlan("at_call_index", 0, seed=start + i),
            )
        )
    return cards


def memo_cards(start: int) -> list[GoalCard]:
    cards = []
    for i in range(5):
        subject = SUBJECTS[i + 5]
        goal = Goal(f"repeat a clip of {subject} twice and join them")
        shot = f"generate a clip of {subject}"
        plan = make_plan(
            "identical steps exercise the memo",
            [
                make_step(1, "text2video_gen", shot),
                make_step(2, "text2video_gen", shot),
                make_step(
                    3,
                    "merge_video",
                    "join both clips",
                    ["output from 1", "output from 2"],
                    [1, 2],
                ),
            ],
        )
        cards.append(
            GoalCard(
                card_id=f"card-{start + i:03d}",
                goal=goal,
                reference_plan=plan,
                failure_spec=FailurePlan("at_call_index", i % 2, seed=start + i),
            )
        )
    return cards


def qa_cards(start: int) -> list[GoalCard]:
    # 5 cards x 10 questions; 38 gold answers match the mock answerer -> 0.76.
    correct_per_card = [8, 8, 8, 7, 7]
    cards = []
    for i in range(5):
        video = QA_VIDEOS[i % 2]
        goal = Goal(
            f"answer questions about stored footage set {i}",
            provided_materials=[video],
        )
        plan = make_plan(
            "summarize the footage before answering",
            [make_step(1, "longvideo_understanding", f"analyze footage set {i}", [video])],
        )
        items = []
        for q in range(10):
            question = f"probe {q} on footage set {i}: what changes in the scene?"
            if q < correct_per_card[i]:
                gold = mock_answer("vision2text_gen", question, video)
            else:
                gold = f"offline-label-{i}-{q}"
            items.append(QaItem(question=question, gold_answer=gold))
        cards.append(
            GoalCard(
                card_id=f"card-{start + i:03d}",
                goal=goal,
                reference_plan=plan,
                failure_spec=FailurePlan("at_call_index", 0, seed=start + i),
                qa_items=items,
            )
        )
    return cards


def ingest_cards(start: int) -> list[GoalCard]:
    cards = []
    for i in range(4):
        topic = ["harbor", "orchard", "desert", "glacier"][i]
        goal = Goal(f"find stock footage of a {topic}, rework it, and subtitle it")
        plan = make_plan(
            "ingest, edit, caption",
            [
                make_step(1, "materials_search", f"find stock footage of a {topic}"),
                make_step(2, "repainting", "rework the found footage", ["output from 1"], [1]),
                make_step(3, "add_subtitle", "caption the result", ["output from 2"], [2]),
            ],
        )
        cards.append(
            GoalCard(
                card_id=f"card-{start + i:03d}",
                goal=goal,
                reference_plan=plan,
                failure_spec=FailurePlan("at_call_index", 1, seed=start + i),
            )
        )
    return cards


def all_cards() -> list[GoalCard]:
    cards = solo_cards()
    cards += extend_cards(10)
    cards += edit_cards(18)
    cards += story_cards(26)
    cards += user_material_cards(31)
    cards += memo_cards(36)
    cards += qa_cards(41)
    cards += ingest_cards(46)
    assert len(cards) == 50, len(cards)
    return cards


MINI_IDS = ("card-000", "card-010", "card-026", "card-036", "card-041")


def main() -> None:
    cards_dir = ROOT / "fixtures" / "cards"
    mini_dir = ROOT / "fixtures" / "mini" / "cards"
    golden_dir = ROOT / "fixtures" / "mini" / "golden"
    for directory in (cards_dir, mini_dir, golden_dir):
        if directory.exists():
            shutil.rmtree(directory)

    cards = all_cards()
    for card in cards:
        save_card(card, cards_dir)
    print(f"wrote {len(cards)} cards to {cards_dir}")

    for card in cards:
        if card.card_id in MINI_IDS:
            save_card(card, mini_dir)
    print(f"wrote {len(MINI_IDS)} cards to {mini_dir}")

    report = run_suite(mini_dir, SuiteConfig(out_dir=golden_dir))
    write_outputs(report, golden_dir, figures=False)
    print(f"wrote golden report and transcripts to {golden_dir}")


if __name__ == "__main__":
    main()
