"""Routes a clinician question to exactly one guideline section.

Two backends: a deterministic keyword scorer that works offline, and a
few-shot chat-model classifier that falls back to the keyword scorer whenever
the model reply cannot be parsed or the gateway fails.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum

from .kb import SectionCatalog
from .llm_gateway import ChatRequest, GatewayError, LlmGateway
from .prompts import load_prompt

logger = logging.getLogger(__name__)

ROUTING_PROMPT_ID = "routing-v1"


class RouteBackend(Enum):
    KEYWORD = "keyword"
    LLM = "llm"


class EmptyCatalog(Exception):
    pass


@dataclass(frozen=True)
class RouteDecision:
    section_id: str
    subsection_id: str | None
    confidence: float
    backend: RouteBackend
    rationale: str


def _keyword_hits(question: str, keywords: tuple[str, ...]) -> list[str]:
    lowered = question.lower()
    hits = []
    for kw in keywords:
        if re.search(rf"\b{re.escape(kw)}\b", lowered):
            hits.append(kw)
    return hits


def route_keyword(question: str, catalog: SectionCatalog) -> RouteDecision:
    """Score sections by how many of their keywords the question mentions.

    Word-boundary, case-insensitive matching; ties go to the lexicographically
    smallest section id; a question matching nothing routes to the catalog's
    default section with confidence 0.
    """
    if not catalog.entries:
        raise EmptyCatalog()

    scored: list[tuple[int, str, list[str]]] = []
    for entry in catalog.entries:
        hits = _keyword_hits(question, entry.keywords)
        scored.append((len(hits), entry.section_id, hits))

    top_score = max(score for score, _, _ in scored)
    if top_score == 0:
        default = catalog.default_section_id or catalog.entries[0].section_id
        return RouteDecision(
            section_id=default,
            subsection_id=None,
            confidence=0.0,
            backend=RouteBackend.KEYWORD,
            rationale="no keyword match; using default section",
        )

    winner = min(sid for score, sid, _ in scored if score == top_score)
    hits = next(h for score, sid, h in scored if sid == winner)
    return RouteDecision(
        section_id=winner,
        subsection_id=None,
        confidence=top_score / (1 + top_score),
        backend=RouteBackend.KEYWORD,
        rationale=f"matched keywords: {', '.join(hits)}",
    )


def route_llm(
    question: str,
    catalog: SectionCatalog,
    gateway: LlmGateway,
    model_name: str = "gpt-4o",
    temperature: float = 0.1,
) -> RouteDecision:
    """Classify with a few-shot prompt; any failure falls back to keywords."""
    if not catalog.entries:
        raise EmptyCatalog()

    sections = "\n".join(f"- {e.section_id}: {e.title}" for e in catalog.entries)
    prompt = load_prompt(ROUTING_PROMPT_ID, sections=sections, question=question)
    request = ChatRequest(
        model_name=model_name,
        system_text="You route clinical questions to guideline sections.",
        user_text=prompt,
        temperature=temperature,
        max_output_tokens=16,
        request_id=f"route-{abs(hash(question)) % 10**8:08d}",
    )
    try:
        reply = gateway.chat(request)
    except GatewayError as exc:
        logger.warning("routing gateway failed (%s); falling back to keywords", exc.kind.value)
        return route_keyword(question, catalog)

    candidate = reply.text.strip()
    if catalog.get(candidate) is not None:
        return RouteDecision(
            section_id=candidate,
            subsection_id=None,
            confidence=0.9,
            backend=RouteBackend.LLM,
            rationale="few-shot classifier reply",
        )
    logger.warning("unparseable routing reply %r; falling back to keywords", candidate[:60])
    return route_keyword(question, catalog)
