"""HTTP/JSON API over the QA pipeline and the risk calculator.

Endpoints: POST /ask, POST /risk, GET /sections, GET /health. The knowledge
base is immutable and loaded once at startup, so request handling is
concurrency-safe; malformed bodies return 400 with field-level messages.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .config import AppConfig
from .llm_gateway import GatewayError, HttpGateway
from .pipeline import QaPipeline, load_kb_any
from .risk import (
    OutOfRange,
    RiskProfile,
    ScoringTable,
    Sex,
    height_from_imperial,
    load_scoring_table,
    score,
    weight_from_pounds,
)

logger = logging.getLogger(__name__)

MAX_QUESTION_CHARS = 4000


class ProfileParseError(Exception):
    def __init__(self, errors: list[dict]):
        self.errors = errors
        super().__init__("; ".join(e["message"] for e in errors))


def parse_risk_profile(doc: dict) -> RiskProfile:
    """Parse the wire-form profile; collects per-field errors."""
    errors: list[dict] = []

    def fail(fieldname: str, message: str) -> None:
        errors.append({"field": fieldname, "message": message})

    age = doc.get("age_years")
    if not isinstance(age, int) or isinstance(age, bool):
        fail("age_years", "must be an integer")
        age = 0

    sex_raw = doc.get("sex")
    sex = Sex.FEMALE
    if sex_raw not in ("male", "female"):
        fail("sex", "must be 'male' or 'female'")
    else:
        sex = Sex(sex_raw)

    booleans = {}
    for fieldname in ("gestational_history", "family_history", "high_blood_pressure", "physically_active"):
        value = doc.get(fieldname)
        if not isinstance(value, bool):
            fail(fieldname, "must be true or false")
            value = False
        booleans[fieldname] = value

    height_cm = 0.0
    height = doc.get("height")
    if isinstance(height, dict) and isinstance(height.get("cm"), (int, float)):
        height_cm = float(height["cm"])
    elif isinstance(height, dict) and isinstance(height.get("feet"), (int, float)):
        height_cm = height_from_imperial(float(height["feet"]), float(height.get("inches", 0) or 0))
    else:
        fail("height", "must be {\"cm\": n} or {\"feet\": n, \"inches\": n}")

    weight_kg = 0.0
    weight = doc.get("weight")
    if isinstance(weight, dict) and isinstance(weight.get("kg"), (int, float)):
        weight_kg = float(weight["kg"])
    elif isinstance(weight, dict) and isinstance(weight.get("lb"), (int, float)):
        weight_kg = weight_from_pounds(float(weight["lb"]))
    else:
        fail("weight", "must be {\"kg\": n} or {\"lb\": n}")

    if errors:
        raise ProfileParseError(errors)

    return RiskProfile(
        age_years=age,
        sex=sex,
        gestational_history=booleans["gestational_history"],
        family_history=booleans["family_history"],
        high_blood_pressure=booleans["high_blood_pressure"],
        physically_active=booleans["physically_active"],
        height_cm=height_cm,
        weight_kg=weight_kg,
    )


def risk_result_dict(result) -> dict:
    return {
        "total_score": result.total_score,
        "category_label": result.category_label,
        "display": result.headline(),
        "interpretation": result.interpretation,
        "recommendations": list(result.recommendations),
        "breakdown": [
            {"item_name": b.item_name, "input_echo": b.input_echo, "points": b.points}
            for b in result.breakdown
        ],
    }


def create_app(
    config: AppConfig | None = None,
    pipeline: QaPipeline | None = None,
    risk_table: ScoringTable | None = None,
) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="guideline-qa", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.server.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    if pipeline is None:
        try:
            kb = load_kb_any(config.resolved_kb_path())
            gateway = None
            if "llm" in (config.answer_backend, config.router_backend):
                gateway = HttpGateway(config.gateway_config())
            pipeline = QaPipeline.from_config(config, kb=kb, gateway=gateway)
        except Exception:
            logger.exception("knowledge base failed to load; serving degraded")
            pipeline = None

    if risk_table is None:
        try:
            risk_table = load_scoring_table(config.resolved_risk_table_path())
        except Exception:
            logger.exception("risk table failed to load; /risk disabled")
            risk_table = None

    app.state.pipeline = pipeline
    app.state.risk_table = risk_table

    def error(status_code: int, message: str, **extra) -> JSONResponse:
        return JSONResponse(status_code=status_code, content={"error": message, **extra})

    @app.post("/ask")
    async def ask(request: Request):
        if app.state.pipeline is None:
            return error(503, "knowledge base not loaded")
        try:
            body = await request.json()
        except Exception:
            return error(400, "body must be JSON")
        if not isinstance(body, dict) or not isinstance(body.get("question"), str):
            return error(400, "body must be {\"question\": \"...\"}")
        question = body["question"]
        if not 1 <= len(question) <= MAX_QUESTION_CHARS:
            return error(400, f"question must be 1..{MAX_QUESTION_CHARS} characters")
        try:
            return JSONResponse(app.state.pipeline.ask(question))
        except GatewayError as exc:
            return error(503, f"generation gateway unavailable ({exc.kind.value})")

    @app.post("/risk")
    async def risk(request: Request):
        if app.state.risk_table is None:
            return error(503, "risk table not loaded")
        try:
            body = await request.json()
        except Exception:
            return error(400, "body must be JSON")
        if not isinstance(body, dict):
            return error(400, "body must be a JSON object")
        try:
            profile = parse_risk_profile(body)
            result = score(profile, app.state.risk_table)
        except ProfileParseError as exc:
            return error(400, "invalid risk profile", errors=exc.errors)
        except OutOfRange as exc:
            return error(400, "invalid risk profile",
                         errors=[{"field": exc.field, "message": str(exc)}])
        return JSONResponse(risk_result_dict(result))

    @app.get("/sections")
    async def sections():
        if app.state.pipeline is None:
            return error(503, "knowledge base not loaded")
        catalog = app.state.pipeline.kb.catalog
        return {
            "default_section_id": catalog.default_section_id,
            "sections": [
                {
                    "section_id": e.section_id,
                    "title": e.title,
                    "subsections": [{"id": s.id, "title": s.title} for s in e.subsections],
                    "keywords": list(e.keywords),
                }
                for e in catalog.entries
            ],
        }

    @app.get("/health")
    async def health():
        loaded = app.state.pipeline is not None
        return {
            "status": "ok" if loaded else "degraded",
            "kb_loaded": loaded,
            "unit_count": len(app.state.pipeline.kb.units) if loaded else 0,
        }

    return app
