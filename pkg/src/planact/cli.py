"""Command line: run benchmark suites, replay transcripts, inspect the catalog,
and score plan files one-shot."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bench.replay import replay
from .bench.report import render_report, write_outputs
from .bench.suite import ALL_MEMORY, SuiteConfig, run_suite
from .errors import CorruptTraceError, FixtureError
from .hub.gateway import ToolHub
from .hub.model import descriptor_to_json
from .metrics import default_rules, depcov, replanq, wped
from .plan import parse_plan, tool_sequence
from .policies import EndpointConfig


def _parse_memory(value: str) -> frozenset[str]:
    if value == "none":
        return frozenset()
    levels = frozenset(part.strip() for part in value.split(",") if part.strip())
    unknown = levels - ALL_MEMORY
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown memory levels: {sorted(unknown)}")
    return levels


def _endpoint_from_env(args: argparse.Namespace) -> EndpointConfig | None:
    # Environment overrides beat flags so deployments can rewire without
    # touching scripts.
    url = os.environ.get("PLANACT_ENDPOINT", args.endpoint)
    if not url:
        return None
    return EndpointConfig(
        url=url,
        model=os.environ.get("PLANACT_MODEL", args.model),
        api_key=os.environ.get("PLANACT_API_KEY", ""),
    )


def cmd_run(args: argparse.Namespace) -> int:
    global_store = os.environ.get("PLANACT_GLOBAL_STORE", args.global_store)
    user_store = os.environ.get("PLANACT_USER_STORE", args.user_store)
    config = SuiteConfig(
        planner=args.planner,
        memory=args.memory,
        seed=args.seed,
        failures=args.failures == "on",
        workers=args.workers,
        out_dir=Path(args.out) if args.out else None,
        endpoint=_endpoint_from_env(args),
        global_store_path=Path(global_store) if global_store else None,
        user_store_path=Path(user_store) if user_store else None,
    )
    if config.planner == "external" and config.endpoint is None:
        print("external planner needs --endpoint or PLANACT_ENDPOINT", file=sys.stderr)
        return 2
    try:
        report = run_suite(args.fixtures, config)
    except FixtureError as exc:
        print(f"fixture error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        write_outputs(report, Path(args.out), figures=not args.no_figures)
    print(render_report(report, args.format), end="")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        replayed = replay(args.transcript)
    except CorruptTraceError as exc:
        print(f"corrupt transcript: {exc}", file=sys.stderr)
        return 2
    metrics = replayed.metrics()
    payload = {
        "session_id": replayed.session.session_id,
        "card_id": replayed.card_id,
        "state": replayed.session.state,
        "wped": metrics.wped,
        "depcov": metrics.depcov,
        "replanq": metrics.replanq,
        "success": metrics.success,
        "memo_hits": replayed.session.memo_hits,
        "replan_events": len(replayed.session.replan_events),
        "tool_calls": len(replayed.session.history),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_catalog(args: argparse.Namespace) -> int:
    hub = ToolHub()
    descriptors = hub.catalog(args.category)
    if args.format == "json":
        print(json.dumps([descriptor_to_json(d) for d in descriptors], indent=2))
        return 0
    for d in descriptors:
        params = ", ".join(
            f"{p.name}:{p.type}" + ("" if p.required else "?") for p in d.params
        )
        print(f"{d.name:<26} {d.kind:<9} {d.category:<20} {d.server_name:<24} ({params})")
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    pred = tool_sequence(parse_plan(Path(args.pred).read_text(encoding="utf-8")))
    ref = tool_sequence(parse_plan(Path(args.ref).read_text(encoding="utf-8")))
    payload = {
        "wped": wped(pred, ref),
        "depcov": depcov(pred, default_rules()),
    }
    if args.replan:
        revised = tool_sequence(parse_plan(Path(args.replan).read_text(encoding="utf-8")))
        payload["replanq"] = replanq(pred, revised, args.failed_step - 1)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planact", description="plan-act benchmark harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a goal-card suite")
    run.add_argument("--fixtures", required=True, help="directory of goal-card JSON files")
    run.add_argument("--planner", choices=("scripted", "external"), default="scripted")
    run.add_argument(
        "--memory",
        type=_parse_memory,
        default=ALL_MEMORY,
        help="comma list from global,user,task or 'none'",
    )
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--failures", choices=("on", "off"), default="off")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", help="directory for report.json, report.csv, transcripts, figures")
    run.add_argument("--format", choices=("json", "table"), default="table")
    run.add_argument("--no-figures", action="store_true")
    run.add_argument("--endpoint", default="", help="external planner URL")
    run.add_argument("--model", default="default", help="external planner model name")
    run.add_argument(
        "--global-store", default="", help="trace-memory JSONL loaded instead of the built-in corpus"
    )
    run.add_argument(
        "--user-store", default="", help="user-memory JSONL loaded instead of the built-in corpus"
    )
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("replay", help="rebuild a session from a transcript")
    rep.add_argument("transcript")
    rep.set_defaults(func=cmd_replay)

    cat = sub.add_parser("catalog", help="list registered tools")
    cat.add_argument("--category", default=None)
    cat.add_argument("--format", choices=("json", "table"), default="table")
    cat.set_defaults(func=cmd_catalog)

    met = sub.add_parser("metrics", help="score one plan file against another")
    met.add_argument("--pred", required=True)
    met.add_argument("--ref", required=True)
    met.add_argument("--replan", help="revised plan file for replanq")
    met.add_argument("--failed-step", type=int, default=1)
    met.set_defaults(func=cmd_metrics)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
