"""Command-line entry points: ask, risk, ingest, eval, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import AppConfig, load_config
from .evalharness import load_cases, render_report, run_eval
from .kb import parse_guideline_markup, serialize_kb
from .llm_gateway import HttpGateway
from .pipeline import QaPipeline
from .risk import (
    RiskProfile,
    Sex,
    height_from_imperial,
    load_scoring_table,
    score,
    weight_from_pounds,
)
from .service import parse_risk_profile, risk_result_dict


def _build_pipeline(args, config: AppConfig) -> QaPipeline:
    if getattr(args, "kb", None):
        config.kb_path = args.kb
    if getattr(args, "backend", None):
        config.answer_backend = args.backend
    gateway = None
    if "llm" in (config.answer_backend, config.router_backend):
        gateway = HttpGateway(config.gateway_config())
    return QaPipeline.from_config(config, gateway=gateway)


def _print_ask_response(response: dict) -> None:
    print("ANSWER")
    print(f"  {response['concise_answer']}")
    if response["status"] == "refused":
        return
    evidence = response["supporting_evidence"]
    print()
    print("SUPPORTING EVIDENCE")
    print("  Citations:")
    for c in evidence["citations"]:
        print(f"    - {c['display']}")
    print("  Clinical recommendations:")
    for text in evidence["clinical_recommendations"]:
        print(f"    - {text}")
    print("  Evidence details:")
    for text in evidence["evidence_details"]:
        print(f"    - {text}")
    print("  Related questions:")
    for text in evidence["related_questions"]:
        print(f"    - {text}")
    route = response["route"]
    print()
    print(f"Routed to section {route['section_id']} ({route['section_title']}) "
          f"via {route['backend']} backend in {response['timing_ms']} ms.")


def cmd_ask(args) -> int:
    config = load_config(args.config)
    pipeline = _build_pipeline(args, config)
    response = pipeline.ask(args.question)
    _print_ask_response(response)
    return 0


def _profile_from_flags(args) -> RiskProfile:
    if args.height_cm is not None:
        height_cm = args.height_cm
    elif args.feet is not None:
        height_cm = height_from_imperial(args.feet, args.inches or 0)
    else:
        raise SystemExit("risk: provide --height-cm or --feet [--inches]")
    if args.weight_kg is not None:
        weight_kg = args.weight_kg
    elif args.pounds is not None:
        weight_kg = weight_from_pounds(args.pounds)
    else:
        raise SystemExit("risk: provide --weight-kg or --pounds")
    if args.age is None or args.sex is None:
        raise SystemExit("risk: --age and --sex are required without --input")
    return RiskProfile(
        age_years=args.age,
        sex=Sex(args.sex),
        gestational_history=args.gestational,
        family_history=args.family_history,
        high_blood_pressure=args.high_blood_pressure,
        physically_active=not args.inactive,
        height_cm=height_cm,
        weight_kg=weight_kg,
    )


def cmd_risk(args) -> int:
    config = load_config(args.config)
    if args.table:
        config.risk_table_path = args.table
    table = load_scoring_table(config.resolved_risk_table_path())
    if args.input:
        doc = json.loads(Path(args.input).read_text(encoding="utf-8"))
        profile = parse_risk_profile(doc)
    else:
        profile = _profile_from_flags(args)
    result = score(profile, table)
    wire = risk_result_dict(result)
    print(wire["display"])
    print(f"Interpretation: {wire['interpretation']}")
    print("Recommendations:")
    for text in wire["recommendations"]:
        print(f"  - {text}")
    print("Breakdown:")
    for item in wire["breakdown"]:
        print(f"  {item['item_name']:<22} {item['input_echo']:<18} +{item['points']}")
    return 0


def cmd_ingest(args) -> int:
    markup = Path(args.markup).read_text(encoding="utf-8")
    kb = parse_guideline_markup(markup)
    Path(args.out).write_bytes(serialize_kb(kb))
    print(f"wrote {len(kb.units)} units / {len(kb.catalog.entries)} sections to {args.out}")
    return 0


def cmd_eval(args) -> int:
    config = load_config(args.config)
    pipeline = _build_pipeline(args, config)
    cases = load_cases(args.cases)
    report = run_eval(pipeline, cases)
    rendered = render_report(report)
    Path(args.report).write_bytes(rendered)
    aggregate = report.aggregate()
    print(
        f"{aggregate['total']} cases: {aggregate['fully_correct']} fully correct, "
        f"{aggregate['minor_incomplete']} minor incomplete, {aggregate['incorrect']} incorrect "
        f"({aggregate['combined_accuracy_pct']}% combined)"
    )
    if report.errors:
        for err in report.errors:
            print(f"case {err['id']} errored: {err['error']}", file=sys.stderr)
        return 1
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(args.config)
    if args.kb:
        config.kb_path = args.kb
    if args.port:
        config.server.port = args.port
    if args.host:
        config.server.host = args.host
    uvicorn.run(create_app(config), host=config.server.host, port=config.server.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="guideline-qa")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ask", help="answer one question against the knowledge base")
    p.add_argument("--question", required=True)
    p.add_argument("--kb", help="KB path (.json interchange or markup)")
    p.add_argument("--backend", choices=["extractive", "llm"])
    p.add_argument("--config")
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("risk", help="compute the diabetes risk score")
    p.add_argument("--input", help="JSON file with the wire-form risk profile")
    p.add_argument("--table", help="scoring table JSON path")
    p.add_argument("--config")
    p.add_argument("--age", type=int)
    p.add_argument("--sex", choices=["male", "female"])
    p.add_argument("--gestational", action="store_true")
    p.add_argument("--family-history", action="store_true")
    p.add_argument("--high-blood-pressure", action="store_true")
    p.add_argument("--inactive", action="store_true")
    p.add_argument("--height-cm", type=float)
    p.add_argument("--feet", type=int)
    p.add_argument("--inches", type=float)
    p.add_argument("--weight-kg", type=float)
    p.add_argument("--pounds", type=float)
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("ingest", help="parse guideline markup into a KB JSON file")
    p.add_argument("--markup", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("eval", help="run the evaluation cases and write a report")
    p.add_argument("--cases", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--kb")
    p.add_argument("--backend", choices=["extractive", "llm"])
    p.add_argument("--config")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config")
    p.add_argument("--kb")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
