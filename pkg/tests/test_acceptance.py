"""Acceptance suite: one test per release criterion, mock gateway and
extractive backend only, no network. Each test prints a PASS line with the
measured counts so the run doubles as a report (pytest -s)."""

import logging
import random
import re
import time
from dataclasses import replace

import pytest

from guideline_qa.cli import main as cli_main
from guideline_qa.config import AppConfig, packaged_markup_path
from guideline_qa.generator import generate_extractive
from guideline_qa.kb import load_kb, parse_guideline_markup, serialize_kb
from guideline_qa.llm_gateway import (
    Backoff,
    ChatRequest,
    ErrorKind,
    GatewayConfig,
    GatewayError,
    HttpGateway,
)
from guideline_qa.pipeline import QaPipeline
from guideline_qa.retriever import RetrievalOptions, lexical_score, retrieve
from guideline_qa.risk import (
    RiskProfile,
    Sex,
    default_table_path,
    load_scoring_table,
    score,
)
from guideline_qa.router import RouteBackend, RouteDecision
from guideline_qa.tokens import extract_numeric_tokens, token_set
from guideline_qa.validator import Status, validate
from conftest import PATIENT_QUESTION
from fakeserver import ScriptedHandler, scripted_server
from kbgen import make_kb, random_question, random_scorer


def _route(section_id: str) -> RouteDecision:
    return RouteDecision(section_id, None, 1.0, RouteBackend.KEYWORD, "acceptance")


def test_worked_example_end_to_end(fixture_kb):
    """Fixture question routes to section 2 with the three thresholds cited."""
    pipeline = QaPipeline(kb=fixture_kb)
    started = time.perf_counter()
    response = pipeline.ask(PATIENT_QUESTION)
    elapsed = time.perf_counter() - started

    assert response["route"]["section_id"] == "2"
    assert response["status"] == "answered"
    cited = {c["unit_id"] for c in response["supporting_evidence"]["citations"]}
    assert "Rec 2.1a" in cited
    detail_tokens = set()
    for detail in response["supporting_evidence"]["evidence_details"]:
        detail_tokens |= token_set(detail)
    required = {"100-125 mg/dL", "5.7-6.4%", "140-199 mg/dL"}
    assert required <= detail_tokens
    assert elapsed < 1.0
    print(f"\n[PASS] worked example end-to-end: section 2, Rec 2.1a cited, "
          f"tokens {sorted(required)} present, {elapsed * 1000:.0f} ms")


def test_tier_dominance_1000_trials():
    """Recommendations < tables < narrative in every bundle; 1000 trials."""
    rng = random.Random(20250810)
    violations = 0
    trials = 1000
    for trial in range(trials):
        kb = make_kb(rng, allow_empty_sections=True)
        section = rng.choice(kb.catalog.entries).section_id
        scorer = rng.choice([None, lexical_score, random_scorer(trial)])
        options = RetrievalOptions(
            max_bundle_size=rng.choice([1, 2, 3, 6, 12]),
            per_tier_cap=rng.choice([None, 1, 2]),
            prefilter=scorer,
        )
        bundle = retrieve(kb, _route(section), random_question(rng), options)
        tiers = [u.priority_tier for u in bundle.items]
        if tiers != sorted(tiers):
            violations += 1
    assert violations == 0
    print(f"[PASS] tier dominance: {trials} randomized (KB, question, scorer) trials, "
          f"{violations} violations")


def _digit_mutations(text: str):
    """All single-digit substitutions inside the text's numeric tokens."""
    for token in extract_numeric_tokens(text):
        for m in re.finditer(re.escape(token.raw), text):
            for offset, ch in enumerate(token.raw):
                if ch.isdigit():
                    pos = m.start() + offset
                    yield text[:pos] + ("9" if ch != "9" else "1") + text[pos + 1:]


def test_numeric_drift_gate_500_responses(fixture_kb):
    """Any single-digit tamper in any claim flips validation to Rejected."""
    rng = random.Random(99)
    responses = []

    for section in ("2", "3", "15"):
        bundle = retrieve(fixture_kb, _route(section), PATIENT_QUESTION, RetrievalOptions())
        responses.append((generate_extractive(bundle), bundle))
    while len(responses) < 500:
        kb = make_kb(rng)
        section = rng.choice(kb.catalog.entries).section_id
        bundle = retrieve(kb, _route(section), random_question(rng), RetrievalOptions())
        if not bundle.items:
            continue
        draft = generate_extractive(bundle)
        if validate(draft, bundle).status is Status.ACCEPTED:
            responses.append((draft, bundle))

    escapes = 0
    mutations = 0
    for draft, bundle in responses:
        assert validate(draft, bundle).status is Status.ACCEPTED
        for mutated in _digit_mutations(draft.concise_answer):
            mutations += 1
            outcome = validate(replace(draft, concise_answer=mutated), bundle)
            if outcome.status is not Status.REJECTED or "numeric-mismatch" not in {
                r.rule for r in outcome.rejections
            }:
                escapes += 1
        for i, detail in enumerate(draft.evidence_details):
            for mutated in _digit_mutations(detail):
                mutations += 1
                details = list(draft.evidence_details)
                details[i] = mutated
                outcome = validate(replace(draft, evidence_details=tuple(details)), bundle)
                if outcome.status is not Status.REJECTED or "numeric-mismatch" not in {
                    r.rule for r in outcome.rejections
                }:
                    escapes += 1
        for i, rec in enumerate(draft.clinical_recommendations):
            for mutated in _digit_mutations(rec):
                mutations += 1
                recs = list(draft.clinical_recommendations)
                recs[i] = mutated
                outcome = validate(replace(draft, clinical_recommendations=tuple(recs)), bundle)
                if outcome.status is not Status.REJECTED or "numeric-mismatch" not in {
                    r.rule for r in outcome.rejections
                }:
                    escapes += 1

    assert len(responses) >= 500
    assert mutations > 0
    assert escapes == 0
    print(f"[PASS] numeric-drift gate: {len(responses)} accepted responses, "
          f"{mutations} single-digit tampers, {escapes} escapes")


def test_refusal_contract(fixture_kb):
    """Empty-section routes refuse with the byte-exact message."""
    expected = "Insufficient guideline evidence for this question"
    pipeline = QaPipeline(kb=fixture_kb)
    response = pipeline.ask("What does the archived appendix cover?")
    assert response["status"] == "refused"
    assert response["concise_answer"] == expected
    assert response["supporting_evidence"]["citations"] == []

    from fastapi.testclient import TestClient

    from guideline_qa.service import create_app

    with TestClient(create_app(AppConfig())) as client:
        body = client.post("/ask", json={"question": "What does the archived appendix cover?"}).json()
        assert body["status"] == "refused"
        assert body["concise_answer"] == expected
    print(f"[PASS] refusal contract: byte-exact refusal {expected!r} from pipeline and API")


def test_risk_oracle_512_combinations():
    """All bracket combinations match a naive sum; score 7 renders as quoted."""
    table = load_scoring_table(default_table_path())
    ages = {20: 0, 45: 1, 55: 2, 70: 3}
    weights = {63.0: 0, 78.0: 1, 101.0: 2, 130.0: 3}  # at 170 cm

    import itertools

    checked = 0
    score7 = 0
    for (age, age_pts), sex, gest, family, bp, active, (weight, bmi_pts) in itertools.product(
        ages.items(), [Sex.MALE, Sex.FEMALE], [False, True], [False, True],
        [False, True], [False, True], weights.items(),
    ):
        profile = RiskProfile(
            age_years=age, sex=sex, gestational_history=gest, family_history=family,
            high_blood_pressure=bp, physically_active=active, height_cm=170.0, weight_kg=weight,
        )
        result = score(profile, table)
        naive = (
            age_pts + (1 if sex is Sex.MALE else 0) + gest + family + bp
            + (0 if active else 1) + bmi_pts
        )
        assert result.total_score == naive
        assert sum(b.points for b in result.breakdown) == result.total_score
        assert len(result.breakdown) == 7
        if result.total_score == 7:
            score7 += 1
            assert result.headline() == "Score: 7 (Increased Risk)"
        checked += 1

    assert checked == 512
    assert score7 > 0
    print(f"[PASS] risk oracle: 512/512 bracket combinations match brute force; "
          f"{score7} profiles totaling 7 all render 'Score: 7 (Increased Risk)'")


def test_kb_round_trip_200_and_ingest_equivalence(tmp_path, capsys):
    """serialize-load identity over 200 generated KBs; ingest == preloaded."""
    rng = random.Random(7)
    for _ in range(200):
        kb = make_kb(rng, max_sections=3, allow_empty_sections=True)
        assert load_kb(serialize_kb(kb)) == kb

    out = tmp_path / "kb.json"
    assert cli_main(["ingest", "--markup", str(packaged_markup_path()), "--out", str(out)]) == 0
    capsys.readouterr()
    ingested = QaPipeline(kb=load_kb(out.read_bytes()))
    preloaded = QaPipeline(kb=parse_guideline_markup(packaged_markup_path().read_text("utf-8")))
    questions = [
        PATIENT_QUESTION,
        "Which A1C range indicates prediabetes on diagnosis?",
        "When during pregnancy should gestational diabetes be screened?",
        "What does the archived appendix cover?",
    ]
    for question in questions:
        a = ingested.ask(question)
        b = preloaded.ask(question)
        a.pop("timing_ms"), b.pop("timing_ms")
        assert a == b
    print(f"[PASS] kb round-trip: 200 generated KBs survive serialize-load; "
          f"ingest-then-ask equals preloaded ask on {len(questions)} fixture questions")


def test_eval_harness_determinism(tmp_path, capsys):
    """Byte-identical reports; grades equal the hand-graded expectations."""
    import json

    cases = packaged_markup_path().parent / "eval_cases.json"
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert cli_main(["eval", "--cases", str(cases), "--report", str(r1)]) == 0
    assert cli_main(["eval", "--cases", str(cases), "--report", str(r2)]) == 0
    capsys.readouterr()
    assert r1.read_bytes() == r2.read_bytes()

    hand_graded = {
        "ifg-workup": "fully_correct",
        "prediabetes-criteria": "fully_correct",
        "lifestyle-targets": "fully_correct",
        "gdm-screening": "minor_incomplete",
        "wrong-section-on-purpose": "incorrect",
        "archived-appendix": "incorrect",
    }
    report = json.loads(r1.read_text("utf-8"))
    assert {c["id"]: c["grade"] for c in report["cases"]} == hand_graded
    print(f"[PASS] eval harness: byte-identical reports; 6/6 grades match hand grading "
          f"({report['aggregate']['combined_accuracy_pct']}% combined)")


def test_gateway_resilience(caplog):
    """Bounded stall, single retry on 429, no retry on 401, no secret leaks."""
    secret = "sk-acceptance-secret"
    request = ChatRequest("m", "sys", "user text", 0.1, 16, "acc-1")

    def config(url, timeout_ms=300, retries=1):
        return GatewayConfig(base_url=url, api_key=secret, timeout_ms=timeout_ms,
                             max_retries=retries, backoff=Backoff(initial_ms=10))

    with caplog.at_level(logging.DEBUG):
        with scripted_server([("stall", 5.0), ("stall", 5.0)]) as url:
            started = time.monotonic()
            with pytest.raises(GatewayError) as exc:
                HttpGateway(config(url)).chat(request)
            elapsed = time.monotonic() - started
            assert exc.value.kind is ErrorKind.TIMEOUT
            assert elapsed < 2 * 0.3 + 0.01 + 0.5  # (retries+1) x timeout + backoff + slack

        with scripted_server([("status", 429), ("ok", "recovered")]) as url:
            reply = HttpGateway(config(url, timeout_ms=2000)).chat(request)
            assert reply.text == "recovered"
            assert len(ScriptedHandler.requests_seen) == 2

        with scripted_server([("status", 401)]) as url:
            with pytest.raises(GatewayError) as exc:
                HttpGateway(config(url, timeout_ms=2000)).chat(request)
            assert exc.value.kind is ErrorKind.AUTH
            assert len(ScriptedHandler.requests_seen) == 1

    assert secret not in caplog.text
    print("[PASS] gateway resilience: stall bounded, 429 retried once, 401 not retried, "
          "secret absent from logs")
