from __future__ import annotations

import json
from pathlib import Path

import pytest

from planact.bench.cards import load_card, load_cards
from planact.bench.replay import replay
from planact.bench.report import (
    render_csv,
    render_report,
    report_from_json,
    write_outputs,
)
from planact.bench.suite import SuiteConfig, SuiteReport, run_suite
from planact.errors import CorruptTraceError, FixtureError
from planact.reference import FULL_SCALE_REFERENCE, REFERENCE_NOTE

from .conftest import FIXTURES

MINI = FIXTURES / "mini" / "cards"
GOLDEN = FIXTURES / "mini" / "golden"
CARDS = FIXTURES / "cards"


# ---------------------------------------------------------------------------
# fixtures and cards

def test_load_fifty_cards():
    cards = load_cards(CARDS)
    assert len(cards) == 50
    assert all(card.failure_spec is not None for card in cards)


def test_qa_items_are_fifty_questions_total():
    cards = load_cards(CARDS)
    questions = sum(len(card.qa_items) for card in cards)
    assert questions == 50


def test_missing_fixture_dir_raises():
    with pytest.raises(FixtureError):
        load_cards(FIXTURES / "nowhere")


def test_bad_card_raises_fixture_error(tmp_path):
    (tmp_path / "card-bad.json").write_text('{"card_id": "card-bad"}', encoding="utf-8")
    with pytest.raises(FixtureError) as exc:
        load_card(tmp_path / "card-bad.json")
    assert exc.value.card_id == "card-bad"


def test_card_with_invalid_reference_plan_rejected(tmp_path):
    card = json.loads((CARDS / "card-000.json").read_text())
    card["reference_plan"]["execution_plan"]["steps"][0]["dependencies"] = [2]
    (tmp_path / "card-x.json").write_text(json.dumps(card), encoding="utf-8")
    with pytest.raises(FixtureError):
        load_card(tmp_path / "card-x.json")


# ---------------------------------------------------------------------------
# suite runs

def test_mini_suite_matches_golden_report(tmp_out):
    report = run_suite(MINI, SuiteConfig(out_dir=tmp_out))
    write_outputs(report, tmp_out, figures=False)
    assert (tmp_out / "report.json").read_text() == (GOLDEN / "report.json").read_text()
    assert (tmp_out / "report.csv").read_text() == (GOLDEN / "report.csv").read_text()
    for golden_transcript in sorted((GOLDEN / "transcripts").glob("*.jsonl")):
        produced = tmp_out / "transcripts" / golden_transcript.name
        assert produced.read_text() == golden_transcript.read_text()


def test_suite_bytes_are_deterministic(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    report_a = run_suite(MINI, SuiteConfig(out_dir=out_a, seed=9))
    report_b = run_suite(MINI, SuiteConfig(out_dir=out_b, seed=9))
    assert render_report(report_a, "json") == render_report(report_b, "json")
    for transcript in sorted((out_a / "transcripts").glob("*.jsonl")):
        twin = out_b / "transcripts" / transcript.name
        assert transcript.read_text() == twin.read_text()


def test_parallel_workers_preserve_report_bytes():
    serial = run_suite(MINI, SuiteConfig(workers=1))
    parallel = run_suite(MINI, SuiteConfig(workers=4))
    assert render_report(serial, "json") == render_report(parallel, "json")


def test_scripted_suite_self_consistency():
    report = run_suite(MINI, SuiteConfig())
    aggregates = report.aggregates()
    assert aggregates["success_rate"] == 1.0
    assert aggregates["mean_wped"] == 1.0


def test_task_memory_off_doubles_the_duplicate_calls():
    baseline = run_suite(MINI, SuiteConfig())
    ablated = run_suite(MINI, SuiteConfig(memory=frozenset({"global", "user"})))
    base_row = {r.card_id: r for r in baseline.rows}
    ablated_row = {r.card_id: r for r in ablated.rows}
    # card-036 carries two identical steps: memo on -> 1 hit, off -> re-invoke
    assert base_row["card-036"].memo_hits == 1
    assert ablated_row["card-036"].memo_hits == 0
    assert ablated_row["card-036"].gateway_calls == base_row["card-036"].gateway_calls + 1
    assert ablated.aggregates()["memo_hits"] == 0


def test_global_memory_off_stops_trace_retrievals():
    baseline = run_suite(MINI, SuiteConfig())
    ablated = run_suite(MINI, SuiteConfig(memory=frozenset({"user", "task"})))
    assert baseline.aggregates()["trace_retrievals"] > 0
    assert ablated.aggregates()["trace_retrievals"] == 0


def test_store_snapshots_replace_builtin_corpus(tmp_path):
    from planact.memory import COMPLETED, GlobalStore, GlobalTrace, UserStore

    global_path = tmp_path / "global.jsonl"
    store = GlobalStore()
    store.add(GlobalTrace("trace-00000", "unrelated goal", ["speech_gen"], COMPLETED))
    store.save(global_path)
    user_path = tmp_path / "user.jsonl"
    UserStore().save(user_path)  # empty user memory

    report = run_suite(
        MINI,
        SuiteConfig(global_store_path=global_path, user_store_path=user_path),
    )
    # the single stored trace shares no tokens with any card goal
    assert report.aggregates()["trace_retrievals"] == 0


def test_failure_injection_yields_one_replan_per_card():
    report = run_suite(MINI, SuiteConfig(failures=True))
    for row in report.rows:
        assert row.replan_count == 1, row.card_id
        assert row.report.replanq is not None
        assert 0.0 < row.report.replanq <= 1.0
        assert row.report.success


def test_full_suite_qa_accuracy_is_pinned():
    report = run_suite(CARDS, SuiteConfig())
    aggregates = report.aggregates()
    assert aggregates["qa_accuracy"] == pytest.approx(0.76)
    assert aggregates["success_rate"] == 1.0
    assert aggregates["mean_wped"] == 1.0


# ---------------------------------------------------------------------------
# rendering

def test_render_json_round_trip():
    report = run_suite(MINI, SuiteConfig())
    parsed = report_from_json(json.loads(render_report(report, "json")))
    assert render_report(parsed, "json") == render_report(report, "json")


def test_render_table_empty_report():
    empty = SuiteReport(config=SuiteConfig().echo(), rows=[])
    table = render_report(empty, "table")
    lines = table.splitlines()
    assert lines[0].startswith("card_id")
    assert "mean_wped" in table and "-" in table
    assert REFERENCE_NOTE in table


def test_report_footer_carries_reference_constants():
    report = run_suite(MINI, SuiteConfig())
    payload = json.loads(render_report(report, "json"))
    assert payload["reference"] == FULL_SCALE_REFERENCE
    assert payload["reference_note"] == REFERENCE_NOTE
    assert "wped" in render_report(report, "table")


def test_render_rejects_unknown_format():
    report = SuiteReport(config={}, rows=[])
    with pytest.raises(ValueError):
        render_report(report, "yaml")


def test_csv_has_one_line_per_card():
    report = run_suite(MINI, SuiteConfig())
    lines = render_csv(report).strip().splitlines()
    assert len(lines) == 1 + len(report.rows)
    assert lines[0].startswith("card_id,wped,depcov")


def test_write_outputs_renders_figures(tmp_out):
    report = run_suite(MINI, SuiteConfig())
    written = write_outputs(report, tmp_out, figures=True)
    names = {path.name for path in written}
    assert {"report.json", "report.csv", "per_card_scores.png", "aggregate_scores.png"} <= names
    for path in written:
        assert path.exists() and path.stat().st_size > 0


# ---------------------------------------------------------------------------
# replay

def transcript_path(tmp_path: Path, card_id: str, failures=False) -> Path:
    out = tmp_path / "live"
    run_suite(MINI, SuiteConfig(out_dir=out, failures=failures))
    return out / "transcripts" / f"{card_id}.jsonl"


def test_replay_reproduces_live_metrics(tmp_path):
    out = tmp_path / "live"
    live = run_suite(MINI, SuiteConfig(out_dir=out, failures=True))
    live_rows = {row.card_id: row for row in live.rows}
    for transcript in sorted((out / "transcripts").glob("*.jsonl")):
        replayed = replay(transcript)
        report = replayed.metrics()
        row = live_rows[replayed.card_id]
        assert report.wped == row.report.wped
        assert report.depcov == row.report.depcov
        assert report.replanq == row.report.replanq
        assert report.success == row.report.success
        assert replayed.session.memo_hits == row.memo_hits


def test_replay_rebuilds_session_state(tmp_path):
    path = transcript_path(tmp_path, "card-036")
    replayed = replay(path)
    session = replayed.session
    assert session.state == "completed"
    assert session.plan.is_complete()
    assert session.memo_hits == 1
    assert len(session.history) == 2  # two real gateway calls; one step memoized


def test_replay_truncated_file(tmp_path):
    path = transcript_path(tmp_path, "card-000")
    text = path.read_text(encoding="utf-8")
    cut = text[: int(len(text) * 0.7)].rstrip("\n")
    broken = tmp_path / "broken.jsonl"
    broken.write_text(cut, encoding="utf-8")
    with pytest.raises(CorruptTraceError) as exc:
        replay(broken)
    assert exc.value.line_number == cut.count("\n") + 1


def test_replay_empty_file(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    replayed = replay(empty)
    assert replayed.session.state == "planning"
    assert replayed.session.plan is None
    assert replayed.session.history == []
