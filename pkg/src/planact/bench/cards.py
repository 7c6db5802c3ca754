"""Goal-card fixtures: a goal, its expert reference plan, and optional probes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import FixtureError, MalformedJson, SchemaError
from ..hub.model import FailurePlan
from ..orchestrator import Goal
from ..plan import Plan, plan_from_json, plan_to_json, validate_plan


@dataclass
class QaItem:
    question: str
    gold_answer: str


@dataclass
class GoalCard:
    card_id: str
    goal: Goal
    reference_plan: Plan
    failure_spec: FailurePlan | None = None
    qa_items: list[QaItem] = field(default_factory=list)


def card_from_json(obj: dict, card_id_hint: str = "?") -> GoalCard:
    card_id = obj.get("card_id", card_id_hint)
    try:
        goal = Goal.from_json(obj["goal"])
        reference_plan = plan_from_json(obj["reference_plan"])
    except (KeyError, SchemaError, MalformedJson, ValueError, TypeError) as exc:
        raise FixtureError(card_id, f"bad card shape: {exc}") from exc

    report = validate_plan(reference_plan)
    if not report.valid:
        raise FixtureError(
            card_id,
            "reference plan invalid: " + "; ".join(v.message for v in report.violations),
        )

    failure_spec = None
    raw_failure = obj.get("failure_spec")
    if raw_failure is not None:
        try:
            failure_spec = FailurePlan(
                mode=raw_failure["mode"],
                value=raw_failure["value"],
                seed=raw_failure.get("seed", 0),
            )
        except (KeyError, TypeError) as exc:
            raise FixtureError(card_id, f"bad failure_spec: {exc}") from exc

    qa_items = [
        QaItem(question=item["question"], gold_answer=item["gold_answer"])
        for item in obj.get("qa_items") or []
    ]
    return GoalCard(
        card_id=card_id,
        goal=goal,
        reference_plan=reference_plan,
        failure_spec=failure_spec,
        qa_items=qa_items,
    )


def card_to_json(card: GoalCard) -> dict:
    obj: dict = {
        "card_id": card.card_id,
        "goal": card.goal.to_json(),
        "reference_plan": plan_to_json(card.reference_plan),
        "failure_spec": None,
        "qa_items": None,
    }
    if card.failure_spec is not None:
        obj["failure_spec"] = {
            "mode": card.failure_spec.mode,
            "value": card.failure_spec.value,
            "seed": card.failure_spec.seed,
        }
    if card.qa_items:
        obj["qa_items"] = [
            {"question": item.question, "gold_answer": item.gold_answer}
            for item in card.qa_items
        ]
    return obj


def load_card(path: str | Path) -> GoalCard:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FixtureError(path.stem, f"not valid JSON: {exc}") from exc
    return card_from_json(obj, card_id_hint=path.stem)


def load_cards(fixture_dir: str | Path) -> list[GoalCard]:
    fixture_dir = Path(fixture_dir)
    paths = sorted(fixture_dir.glob("*.json"))
    if not paths:
        raise FixtureError(str(fixture_dir), "no card files found")
    cards = [load_card(path) for path in paths]
    cards.sort(key=lambda card: card.card_id)
    return cards


def save_card(card: GoalCard, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{card.card_id}.json"
    path.write_text(
        json.dumps(card_to_json(card), indent=2, ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return path
