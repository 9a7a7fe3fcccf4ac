from guideline_qa.llm_gateway import ErrorKind, GatewayError, mock_gateway
from guideline_qa.pipeline import QaPipeline
from conftest import PATIENT_QUESTION

# A reply whose citation is valid but whose evidence detail invents a number
# not present anywhere in section 2 -> validator must reject it.
DRIFTING_REPLY = """ANSWER:
FPG of 130 mg/dL lies in the impaired fasting glucose range. Confirm with A1C or OGTT testing.
CITATIONS:
- Rec 2.1a (A)
EVIDENCE:
- FPG 100–127 mg/dL
"""

GROUNDED_REPLY = """ANSWER:
The fasting glucose result falls in the impaired fasting glucose range for prediabetes. Confirm with an A1C test or a 2-hour OGTT.
CITATIONS:
- Rec 2.1a (A)
- Table 2.2, row 2
EVIDENCE:
- A1C 5.7–6.4%
RELATED:
- What A1C range indicates prediabetes?
"""


def _llm_pipeline(fixture_kb, reply):
    gateway = mock_gateway([("Sections:", "2"), ("", reply)])
    return QaPipeline(kb=fixture_kb, answer_backend="llm", router_backend="llm", gateway=gateway)


def test_llm_backend_answers_when_grounded(fixture_kb):
    pipeline = _llm_pipeline(fixture_kb, GROUNDED_REPLY)
    response = pipeline.ask(PATIENT_QUESTION)
    assert response["status"] == "answered"
    assert response["route"]["backend"] == "llm"
    assert response["supporting_evidence"]["evidence_details"] == ["A1C 5.7–6.4%"]


def test_rejected_llm_draft_regenerates_extractive(fixture_kb):
    pipeline = _llm_pipeline(fixture_kb, DRIFTING_REPLY)
    response = pipeline.ask(PATIENT_QUESTION)
    # the drifting number never reaches the caller; the extractive retry does
    assert response["status"] == "answered"
    joined = " ".join(response["supporting_evidence"]["evidence_details"])
    assert "100–127" not in joined and "100-127" not in joined
    assert "100–125 mg/dL" in joined


def test_gateway_failure_degrades_to_extractive_answer(fixture_kb):
    gateway = mock_gateway([("", GatewayError(ErrorKind.TIMEOUT, "stall", "r"))])
    pipeline = QaPipeline(kb=fixture_kb, answer_backend="llm", router_backend="llm", gateway=gateway)
    response = pipeline.ask(PATIENT_QUESTION)
    assert response["status"] == "answered"
    assert response["route"]["backend"] == "keyword"
    cited = {c["unit_id"] for c in response["supporting_evidence"]["citations"]}
    assert "Rec 2.1a" in cited


def test_refused_question_reports_route(fixture_kb):
    pipeline = QaPipeline(kb=fixture_kb)
    response = pipeline.ask("What does the archived appendix cover?")
    assert response["status"] == "refused"
    assert response["route"]["section_id"] == "99"
    assert response["route"]["section_title"] == "Archived Appendix"
