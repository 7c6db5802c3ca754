"""Matplotlib renderings of a suite report, written next to the delimited output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from ..reference import FULL_SCALE_REFERENCE
from .suite import SuiteReport

# Omitting the Date field keeps PNG bytes identical across runs.
_SAVE_KW = {"dpi": 110, "metadata": {"Date": None}}


def _per_card_figure(report: SuiteReport, path: Path) -> None:
    rows = report.rows
    xs = range(len(rows))
    wped = [r.report.wped if r.report.wped is not None else 0.0 for r in rows]
    depcov = [r.report.depcov if r.report.depcov is not None else 0.0 for r in rows]

    fig, ax = plt.subplots(figsize=(max(6, len(rows) * 0.18), 3.4))
    ax.bar(xs, wped, width=0.8, color="#3b6ea5", label="plan similarity")
    ax.plot(xs, depcov, color="#c44e52", lw=1.2, label="dependency coverage")
    ax.set_xlabel("card")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1.05)
    ax.set_title("per-card plan scores")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def _aggregate_figure(report: SuiteReport, path: Path) -> None:
    aggregates = report.aggregates()
    keys = ["mean_wped", "mean_depcov", "mean_replanq", "success_rate", "qa_accuracy"]
    values = [aggregates.get(k) or 0.0 for k in keys]

    fig, ax = plt.subplots(figsize=(6, 3.4))
    ax.bar(range(len(keys)), values, color="#55a868")
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels([k.replace("mean_", "") for k in keys], fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_title("suite aggregates")
    # Published full-scale context lines; unreachable with mocks by design.
    ax.axhline(
        FULL_SCALE_REFERENCE["wped"]["plan_act"],
        color="#3b6ea5",
        ls="--",
        lw=0.8,
        label="full-scale wped (plan-act)",
    )
    ax.axhline(
        FULL_SCALE_REFERENCE["success_rate"]["plan_act"],
        color="#8172b2",
        ls=":",
        lw=0.8,
        label="full-scale success rate (plan-act)",
    )
    ax.legend(fontsize=7, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def render_figures(report: SuiteReport, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    per_card = out_dir / "per_card_scores.png"
    aggregate = out_dir / "aggregate_scores.png"
    _per_card_figure(report, per_card)
    _aggregate_figure(report, aggregate)
    return [per_card, aggregate]
