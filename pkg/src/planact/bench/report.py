"""Report rendering: canonical JSON, a fixed-width table, and delimited rows."""

from __future__ import annotations

import json
from pathlib import Path

from ..metrics import MetricReport
from ..reference import FULL_SCALE_REFERENCE, REFERENCE_NOTE
from .suite import CardResult, SuiteReport


def _row_to_json(row: CardResult) -> dict:
    return {
        "card_id": row.card_id,
        "wped": row.report.wped,
        "depcov": row.report.depcov,
        "replanq": row.report.replanq,
        "success": row.report.success,
        "notes": row.report.notes,
        "memo_hits": row.memo_hits,
        "trace_retrievals": row.trace_retrievals,
        "storyboard_writes": row.storyboard_writes,
        "replan_events": row.replan_count,
        "gateway_calls": row.gateway_calls,
        "qa_correct": row.qa_correct,
        "qa_total": row.qa_total,
        "error": row.error,
    }


def _row_from_json(obj: dict) -> CardResult:
    return CardResult(
        card_id=obj["card_id"],
        report=MetricReport(
            wped=obj["wped"],
            depcov=obj["depcov"],
            replanq=obj["replanq"],
            success=obj["success"],
            notes=obj.get("notes", ""),
        ),
        memo_hits=obj["memo_hits"],
        trace_retrievals=obj["trace_retrievals"],
        storyboard_writes=obj["storyboard_writes"],
        replan_count=obj["replan_events"],
        gateway_calls=obj["gateway_calls"],
        qa_correct=obj.get("qa_correct"),
        qa_total=obj.get("qa_total"),
        error=obj.get("error"),
    )


def report_to_json(report: SuiteReport) -> dict:
    return {
        "config": report.config,
        "aggregates": report.aggregates(),
        "cards": [_row_to_json(row) for row in report.rows],
        "reference": FULL_SCALE_REFERENCE,
        "reference_note": REFERENCE_NOTE,
    }


def report_from_json(obj: dict) -> SuiteReport:
    return SuiteReport(
        config=obj["config"], rows=[_row_from_json(row) for row in obj["cards"]]
    )


def _fmt(value, width: int) -> str:
    if value is None:
        text = "-"
    elif isinstance(value, bool):
        text = "yes" if value else "no"
    elif isinstance(value, float):
        text = f"{value:.4f}"
    else:
        text = str(value)
    return text.rjust(width)


def render_table(report: SuiteReport) -> str:
    header = (
        f"{'card_id':<14}{'wped':>8}{'depcov':>8}{'replanq':>9}"
        f"{'success':>9}{'memo':>6}{'recall':>8}{'replans':>9}{'qa':>8}"
    )
    lines = [header, "-" * len(header)]
    for row in report.rows:
        qa = f"{row.qa_correct}/{row.qa_total}" if row.qa_total else "-"
        lines.append(
            f"{row.card_id:<14}"
            + _fmt(row.report.wped, 8)
            + _fmt(row.report.depcov, 8)
            + _fmt(row.report.replanq, 9)
            + _fmt(row.report.success, 9)
            + _fmt(row.memo_hits, 6)
            + _fmt(row.trace_retrievals, 8)
            + _fmt(row.replan_count, 9)
            + qa.rjust(8)
        )
    lines.append("-" * len(header))
    aggregates = report.aggregates()
    for key in (
        "cards",
        "mean_wped",
        "mean_depcov",
        "mean_replanq",
        "success_rate",
        "qa_accuracy",
        "memo_hits",
        "trace_retrievals",
        "replan_events",
    ):
        lines.append(f"{key:<18}{_fmt(aggregates.get(key), 10).strip()}")
    lines.append("")
    lines.append("full-scale reference (not reproducible with mocks):")
    for key, value in sorted(FULL_SCALE_REFERENCE.items()):
        lines.append(f"  {key}: {value}")
    lines.append(REFERENCE_NOTE)
    return "\n".join(lines) + "\n"


def render_report(report: SuiteReport, format: str = "json") -> str:
    """json is canonical and machine-diffable; table is for humans."""
    if format == "json":
        return (
            json.dumps(report_to_json(report), indent=2, ensure_ascii=False, sort_keys=True)
            + "\n"
        )
    if format == "table":
        return render_table(report)
    raise ValueError(f"unknown report format {format!r}")


CSV_COLUMNS = (
    "card_id",
    "wped",
    "depcov",
    "replanq",
    "success",
    "memo_hits",
    "trace_retrievals",
    "storyboard_writes",
    "replan_events",
    "gateway_calls",
    "qa_correct",
    "qa_total",
)


def render_csv(report: SuiteReport) -> str:
    def cell(value) -> str:
        if value is None:
            return ""
        if isinstance(value, bool):
            return "1" if value else "0"
        if isinstance(value, float):
            return f"{value:.6f}"
        return str(value)

    lines = [",".join(CSV_COLUMNS)]
    for row in report.rows:
        obj = _row_to_json(row)
        lines.append(",".join(cell(obj[column]) for column in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def write_outputs(report: SuiteReport, out_dir: str | Path, figures: bool = True) -> list[Path]:
    """Write report.json and report.csv, plus figures unless disabled."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    json_path = out_dir / "report.json"
    json_path.write_text(render_report(report, "json"), encoding="utf-8")
    written.append(json_path)

    csv_path = out_dir / "report.csv"
    csv_path.write_text(render_csv(report), encoding="utf-8")
    written.append(csv_path)

    if figures:
        from .figures import render_figures

        written.extend(render_figures(report, out_dir / "figures"))
    return written
