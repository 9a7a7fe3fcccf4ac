import pytest
from fastapi.testclient import TestClient

from guideline_qa.config import AppConfig
from guideline_qa.service import create_app
from guideline_qa.tokens import token_set
from conftest import PATIENT_QUESTION


@pytest.fixture(scope="module")
def client():
    app = create_app(AppConfig())
    with TestClient(app) as c:
        yield c


PATIENT_PROFILE = {
    "age_years": 45,
    "sex": "male",
    "gestational_history": False,
    "family_history": True,
    "high_blood_pressure": True,
    "physically_active": False,
    "height": {"feet": 5, "inches": 8},
    "weight": {"lb": 200},
}


# ---------------------------------------------------------------------------
# /ask
# ---------------------------------------------------------------------------

def test_ask_patient_question(client):
    resp = client.post("/ask", json={"question": PATIENT_QUESTION})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "answered"
    assert body["route"]["section_id"] == "2"
    cited = {c["unit_id"] for c in body["supporting_evidence"]["citations"]}
    assert "Rec 2.1a" in cited
    detail_tokens = set()
    for detail in body["supporting_evidence"]["evidence_details"]:
        detail_tokens |= token_set(detail)
    assert {"100-125 mg/dL", "5.7-6.4%", "140-199 mg/dL"} <= detail_tokens
    assert body["concise_answer"]
    assert body["supporting_evidence"]["validation"]


def test_ask_two_part_contract(client):
    body = client.post("/ask", json={"question": PATIENT_QUESTION}).json()
    assert body["concise_answer"] != ""
    assert len(body["supporting_evidence"]["citations"]) >= 1


def test_ask_empty_section_refuses_verbatim(client):
    resp = client.post("/ask", json={"question": "What does the archived appendix cover?"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "refused"
    assert body["concise_answer"] == "Insufficient guideline evidence for this question"
    assert body["supporting_evidence"]["citations"] == []
    assert body["route"]["section_id"] == "99"


def test_ask_rejects_oversized_question(client):
    resp = client.post("/ask", json={"question": "x" * 4001})
    assert resp.status_code == 400


def test_ask_rejects_empty_and_malformed_bodies(client):
    assert client.post("/ask", json={"question": ""}).status_code == 400
    assert client.post("/ask", json={"q": "hi"}).status_code == 400
    assert client.post("/ask", content=b"not json").status_code == 400


def test_ask_deterministic_minus_timing(client):
    first = client.post("/ask", json={"question": PATIENT_QUESTION}).json()
    second = client.post("/ask", json={"question": PATIENT_QUESTION}).json()
    first.pop("timing_ms")
    second.pop("timing_ms")
    assert first == second


def test_answered_response_never_leaks_foreign_tokens(client, fixture_kb):
    # end-to-end restatement of the validator gate
    from guideline_qa.kb import units_in_section

    for question in (PATIENT_QUESTION, "Which A1C range indicates prediabetes on diagnosis?"):
        body = client.post("/ask", json={"question": question}).json()
        assert body["status"] == "answered"
        section = body["route"]["section_id"]
        section_tokens = set()
        for unit in units_in_section(fixture_kb, section):
            section_tokens |= token_set(unit.flat_text())
        response_tokens = token_set(body["concise_answer"])
        for part in ("clinical_recommendations", "evidence_details"):
            for text in body["supporting_evidence"][part]:
                response_tokens |= token_set(text)
        assert response_tokens <= section_tokens


# ---------------------------------------------------------------------------
# /risk
# ---------------------------------------------------------------------------

def test_risk_patient_profile(client):
    resp = client.post("/risk", json=PATIENT_PROFILE)
    assert resp.status_code == 200
    body = resp.json()
    assert body["total_score"] == 7
    assert body["display"] == "Score: 7 (Increased Risk)"
    assert len(body["breakdown"]) == 7
    assert sum(item["points"] for item in body["breakdown"]) == 7
    assert body["interpretation"]
    assert body["recommendations"]


def test_risk_metric_equivalent(client):
    metric = dict(PATIENT_PROFILE, height={"cm": 172.72}, weight={"kg": 90.718474})
    body = client.post("/risk", json=metric).json()
    assert body["total_score"] == 7


def test_risk_out_of_range_field_error(client):
    bad = dict(PATIENT_PROFILE, weight={"kg": 10})
    resp = client.post("/risk", json=bad)
    assert resp.status_code == 400
    errors = resp.json()["errors"]
    assert any(e["field"] == "weight" for e in errors)


def test_risk_type_errors_are_field_level(client):
    bad = dict(PATIENT_PROFILE, age_years="forty-five", sex="other")
    resp = client.post("/risk", json=bad)
    assert resp.status_code == 400
    fields = {e["field"] for e in resp.json()["errors"]}
    assert {"age_years", "sex"} <= fields


# ---------------------------------------------------------------------------
# /sections, /health, misc
# ---------------------------------------------------------------------------

def test_sections_catalog(client):
    body = client.get("/sections").json()
    assert body["default_section_id"] == "2"
    ids = [s["section_id"] for s in body["sections"]]
    assert ids == ["2", "3", "15", "99"]
    assert all(s["keywords"] for s in body["sections"])


def test_health_ok(client):
    body = client.get("/health").json()
    assert body == {"status": "ok", "kb_loaded": True, "unit_count": 6}


def test_health_degraded_without_kb(tmp_path):
    config = AppConfig(kb_path=str(tmp_path / "missing.json"))
    app = create_app(config)
    with TestClient(app) as degraded:
        body = degraded.get("/health").json()
        assert body == {"status": "degraded", "kb_loaded": False, "unit_count": 0}
        assert degraded.post("/ask", json={"question": "hi"}).status_code == 503


def test_unknown_route_404(client):
    assert client.get("/nope").status_code == 404


def test_get_endpoints_are_idempotent(client):
    assert client.get("/sections").json() == client.get("/sections").json()
    assert client.get("/health").json() == client.get("/health").json()
