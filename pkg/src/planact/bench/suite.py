"""Suite runner: one session per goal card under a fixed configuration.

Each card runs on fresh stores so cards are order-independent and may execute
in parallel workers; determinism comes from the scripted planner, the seeded
failure plans, logical-clock traces, and card-id-sorted report rows.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..hub.gateway import ToolHub
from ..memory import COMPLETED, GlobalStore, GlobalTrace, MemoryHub, UserMaterial, UserStore
from ..metrics import (
    MetricReport,
    default_rules,
    depcov,
    replanq,
    success_rate,
    wped,
)
from ..orchestrator import Orchestrator, RunConfig, Session
from ..plan import tool_sequence
from ..policies import EndpointConfig, ExternalPlanner, ScriptedPlanner
from .cards import GoalCard, load_cards

ALL_MEMORY = frozenset({"global", "user", "task"})


@dataclass
class SuiteConfig:
    planner: str = "scripted"  # "scripted" | "external"
    memory: frozenset[str] = ALL_MEMORY
    seed: int = 0
    failures: bool = False
    workers: int = 1
    out_dir: Path | None = None
    endpoint: EndpointConfig | None = None
    # Optional store snapshots loaded instead of the built-in corpus. Cards
    # still run on per-card copies, so files are never written back.
    global_store_path: Path | None = None
    user_store_path: Path | None = None

    def echo(self) -> dict:
        return {
            "planner": self.planner,
            "memory": sorted(self.memory),
            "seed": self.seed,
            "failures": self.failures,
        }


@dataclass
class CardResult:
    card_id: str
    report: MetricReport
    memo_hits: int = 0
    trace_retrievals: int = 0
    storyboard_writes: int = 0
    replan_count: int = 0
    gateway_calls: int = 0
    qa_correct: int | None = None
    qa_total: int | None = None
    error: str | None = None


@dataclass
class SuiteReport:
    config: dict
    rows: list[CardResult] = field(default_factory=list)

    def reports(self) -> list[MetricReport]:
        return [row.report for row in self.rows]

    def aggregates(self) -> dict:
        def mean(values: list[float]) -> float | None:
            return sum(values) / len(values) if values else None

        rows = self.rows
        qa_totals = [(r.qa_correct, r.qa_total) for r in rows if r.qa_total]
        asked = sum(total for _, total in qa_totals)
        return {
            "cards": len(rows),
            "mean_wped": mean([r.report.wped for r in rows if r.report.wped is not None]),
            "mean_depcov": mean(
                [r.report.depcov for r in rows if r.report.depcov is not None]
            ),
            "mean_replanq": mean(
                [r.report.replanq for r in rows if r.report.replanq is not None]
            ),
            "success_rate": success_rate(self.reports()) if rows else None,
            "completed_rate": (
                sum(1 for r in rows if r.report.success) / len(rows) if rows else None
            ),
            "qa_accuracy": (
                sum(correct for correct, _ in qa_totals) / asked if asked else None
            ),
            "memo_hits": sum(r.memo_hits for r in rows),
            "trace_retrievals": sum(r.trace_retrievals for r in rows),
            "replan_events": sum(r.replan_count for r in rows),
        }


def seed_user_store() -> UserStore:
    """The deterministic user corpus every suite run starts from."""
    store = UserStore()
    materials = [
        UserMaterial("m-001", "mock://user/cat.png", "image", ["cat", "pet"], 3),
        UserMaterial("m-002", "mock://user/dog.png", "image", ["dog", "pet"], 5),
        UserMaterial("m-003", "mock://user/city.mp4", "video", ["city", "street"], 2),
        UserMaterial("m-004", "mock://user/voice.wav", "audio", ["voice", "narration"], 4),
        UserMaterial("m-005", "mock://user/forest.mp4", "video", ["forest", "nature"], 1),
        UserMaterial("m-006", "mock://user/source_a.mp4", "video", ["footage", "a"], 6),
        UserMaterial("m-007", "mock://user/source_b.mp4", "video", ["footage", "b"], 7),
    ]
    for material in materials:
        store.add_material(material)
    store.set_preference("preferred_resolution", "480p")
    store.set_preference("preferred_style", "cinematic")
    return store


def expert_traces(cards: list[GoalCard]) -> list[GlobalTrace]:
    """Reference plans replayed as an expert trajectory corpus for global memory."""
    return [
        GlobalTrace(
            trace_id=f"trace-{index:05d}",
            goal_text=card.goal.goal_text,
            tool_sequence=tool_sequence(card.reference_plan),
            outcome=COMPLETED,
            score=1.0,
        )
        for index, card in enumerate(sorted(cards, key=lambda c: c.card_id))
    ]


def session_metrics(
    session: Session, reference_tools: list[str] | None
) -> MetricReport:
    """The per-run metric block; shared by live runs and transcript replay."""
    predicted = tool_sequence(session.plan) if session.plan is not None else []
    report = MetricReport(
        wped=wped(predicted, reference_tools) if reference_tools is not None else None,
        depcov=depcov(predicted, default_rules()),
        success=session.state == COMPLETED,
    )
    if session.replan_events:
        scores = [
            replanq(
                tool_sequence(event.old_plan),
                tool_sequence(event.new_plan),
                event.failed_step - 1,
            )
            for event in session.replan_events
        ]
        report.replanq = sum(scores) / len(scores)
    return report


def qa_probe(hub: ToolHub, card: GoalCard) -> tuple[int, int]:
    """Answer each question against the card's first provided video through the
    understanding workflow; returns (exact matches, questions asked)."""
    if not card.goal.provided_materials:
        return 0, len(card.qa_items)
    video = card.goal.provided_materials[0]
    qa_session = f"{card.card_id}-qa"
    hub.open_session(qa_session)
    correct = 0
    for item in card.qa_items:
        result = hub.invoke_by_name(
            "longvideo_understanding",
            {"video": video, "prompt": item.question},
            qa_session,
            0,
        )
        predicted = (
            result.artifact.metadata.get("answer", "")
            if result.ok and result.artifact is not None
            else ""
        )
        if predicted == item.gold_answer:
            correct += 1
    return correct, len(card.qa_items)


def _planner_for(card: GoalCard, config: SuiteConfig):
    if config.planner == "external":
        if config.endpoint is None:
            raise ValueError("external planner requires endpoint configuration")
        return ExternalPlanner(config.endpoint)
    return ScriptedPlanner.for_plan(card.goal.goal_text, card.reference_plan)


def run_card(
    card: GoalCard, config: SuiteConfig, traces: list[GlobalTrace]
) -> CardResult:
    global_store = GlobalStore()
    if config.global_store_path is not None:
        global_store.load(config.global_store_path)
    else:
        for trace in traces:
            global_store.add(trace)
    if config.user_store_path is not None:
        user_store = UserStore()
        user_store.load(config.user_store_path)
    else:
        user_store = seed_user_store()
    memory = MemoryHub(
        global_store=global_store,
        user_store=user_store,
        enabled=config.memory,
    )
    hub = ToolHub()
    if config.failures and card.failure_spec is not None:
        hub.configure_failure(card.failure_spec)

    transcript_path = None
    if config.out_dir is not None:
        transcript_path = Path(config.out_dir) / "transcripts" / f"{card.card_id}.jsonl"

    orchestrator = Orchestrator(hub, memory, _planner_for(card, config))
    run_config = RunConfig(
        session_id=card.card_id,
        transcript_path=transcript_path,
        reference_tools=tool_sequence(card.reference_plan),
        card_id=card.card_id,
        config_echo={"seed": config.seed, "failures": config.failures},
    )

    try:
        session = orchestrator.run_task(card.goal, run_config)
    except Exception as exc:  # record the wreckage, keep the suite moving
        return CardResult(
            card_id=card.card_id,
            report=MetricReport(success=False, notes=f"{type(exc).__name__}: {exc}"),
            error=f"{type(exc).__name__}: {exc}",
        )

    result = CardResult(
        card_id=card.card_id,
        report=session_metrics(session, run_config.reference_tools),
        memo_hits=session.memo_hits,
        trace_retrievals=session.trace_retrievals,
        storyboard_writes=session.storyboard_writes,
        replan_count=len(session.replan_events),
        gateway_calls=session.gateway_attempts,
    )
    if card.qa_items:
        result.qa_correct, result.qa_total = qa_probe(hub, card)
    return result


def run_suite(fixture_dir: str | Path, config: SuiteConfig | None = None) -> SuiteReport:
    config = config or SuiteConfig()
    cards = load_cards(fixture_dir)
    traces = expert_traces(cards)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(lambda card: run_card(card, config, traces), cards))
    else:
        rows = [run_card(card, config, traces) for card in cards]

    rows.sort(key=lambda row: row.card_id)
    return SuiteReport(config=config.echo(), rows=rows)
