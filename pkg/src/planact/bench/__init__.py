"""Benchmark harness: goal cards, suite runner, reports, figures, replay."""

from .cards import GoalCard, QaItem, card_from_json, card_to_json, load_card, load_cards, save_card
from .replay import ReplayedSession, replay
from .report import render_csv, render_report, report_from_json, report_to_json, write_outputs
from .suite import (
    ALL_MEMORY,
    CardResult,
    SuiteConfig,
    SuiteReport,
    expert_traces,
    run_card,
    run_suite,
    seed_user_store,
    session_metrics,
)

__all__ = [
    "ALL_MEMORY",
    "CardResult",
    "GoalCard",
    "QaItem",
    "ReplayedSession",
    "SuiteConfig",
    "SuiteReport",
    "card_from_json",
    "card_to_json",
    "expert_traces",
    "load_card",
    "load_cards",
    "render_csv",
    "render_report",
    "replay",
    "report_from_json",
    "report_to_json",
    "run_card",
    "run_suite",
    "save_card",
    "seed_user_store",
    "session_metrics",
    "write_outputs",
]
