"""Desk-scale evaluation harness with mechanical three-way grading.

Grades are a deterministic proxy (section match, required citations,
normalized numeric tokens), not a clinical judgment; the report header says
so. Repeated runs over the same inputs produce byte-identical reports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .pipeline import QaPipeline
from .tokens import normalize_numeric_token, token_set

GRADES = ("fully_correct", "minor_incomplete", "incorrect")


@dataclass(frozen=True)
class EvalCase:
    id: str
    question: str
    expected_section_id: str
    required_citation_ids: frozenset[str] = frozenset()
    required_tokens: frozenset[str] = frozenset()
    forbidden_tokens: frozenset[str] = frozenset()


def load_cases(path: str | Path) -> list[EvalCase]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    cases = []
    for raw in doc["cases"]:
        expected = raw["expected"]
        cases.append(
            EvalCase(
                id=str(raw["id"]),
                question=raw["question"],
                expected_section_id=expected["section_id"],
                required_citation_ids=frozenset(expected.get("required_citation_ids", [])),
                required_tokens=frozenset(
                    normalize_numeric_token(t) for t in expected.get("required_tokens", [])
                ),
                forbidden_tokens=frozenset(
                    normalize_numeric_token(t) for t in expected.get("forbidden_tokens", [])
                ),
            )
        )
    return cases


def response_tokens(response: dict) -> set[str]:
    """Normalized numeric tokens across the claim-bearing response parts."""
    evidence = response["supporting_evidence"]
    tokens = token_set(response["concise_answer"])
    for text in evidence["clinical_recommendations"]:
        tokens |= token_set(text)
    for text in evidence["evidence_details"]:
        tokens |= token_set(text)
    return tokens


def grade_case(case: EvalCase, response: dict) -> dict:
    cited = {c["unit_id"] for c in response["supporting_evidence"]["citations"]}
    tokens = response_tokens(response)

    section_ok = response["route"]["section_id"] == case.expected_section_id
    citations_ok = case.required_citation_ids <= cited
    missing_tokens = sorted(case.required_tokens - tokens)
    forbidden_hits = sorted(case.forbidden_tokens & tokens)

    if section_ok and citations_ok and not missing_tokens and not forbidden_hits:
        grade = "fully_correct"
    elif section_ok and citations_ok and not forbidden_hits and missing_tokens:
        grade = "minor_incomplete"
    else:
        grade = "incorrect"

    return {
        "id": case.id,
        "grade": grade,
        "status": response["status"],
        "section_ok": section_ok,
        "citations_ok": citations_ok,
        "missing_tokens": missing_tokens,
        "forbidden_hits": forbidden_hits,
    }


@dataclass
class EvalReport:
    results: list[dict] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)

    def aggregate(self) -> dict:
        counts = {g: 0 for g in GRADES}
        for r in self.results:
            counts[r["grade"]] += 1
        total = len(self.results)
        combined = counts["fully_correct"] + counts["minor_incomplete"]
        pct = round(100.0 * combined / total, 1) if total else 0.0
        return {**counts, "total": total, "combined_accuracy_pct": pct}


def run_eval(pipeline: QaPipeline, cases: list[EvalCase]) -> EvalReport:
    report = EvalReport()
    for case in cases:
        try:
            response = pipeline.ask(case.question)
        except Exception as exc:  # pipeline bug or bad case input
            report.errors.append({"id": case.id, "error": f"{type(exc).__name__}: {exc}"})
            continue
        report.results.append(grade_case(case, response))
    return report


def render_report(report: EvalReport) -> bytes:
    """Deterministic JSON report; no timestamps, stable ordering."""
    doc = {
        "header": {
            "grading": "mechanical proxy: routed section, required citations, "
                       "normalized numeric tokens; not a clinical judgment",
        },
        "cases": report.results,
        "errors": report.errors,
        "aggregate": report.aggregate(),
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
