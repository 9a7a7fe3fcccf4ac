"""End-to-end question pipeline: route, retrieve, generate, validate.

A rejected draft is regenerated once with the extractive backend and
re-validated; a draft that still fails (or an empty evidence bundle) yields
the refusal response instead of unsupported text.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .config import AppConfig
from .generator import (
    DraftResponse,
    GenBackend,
    GenerationConfig,
    generate_extractive,
    generate_llm,
)
from .kb import KnowledgeBase, load_kb, parse_guideline_markup
from .llm_gateway import LlmGateway
from .retriever import RetrievalOptions, retrieve, lexical_score
from .router import RouteDecision, route_keyword, route_llm
from .validator import REFUSAL_MESSAGE, Status, validate


def load_kb_any(path: str | Path) -> KnowledgeBase:
    """Load a KB from either the JSON interchange form or guideline markup."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return load_kb(text)
    return parse_guideline_markup(text)


def _citation_dict(c) -> dict:
    return {"display": c.display, "unit_id": c.unit_id, "row_index": c.row_index}


@dataclass
class QaPipeline:
    kb: KnowledgeBase
    answer_backend: str = "extractive"
    router_backend: str = "keyword"
    gateway: LlmGateway | None = None
    retrieval: RetrievalOptions = field(default_factory=RetrievalOptions)
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    model_name: str = "gpt-4o"

    @classmethod
    def from_config(cls, config: AppConfig, kb: KnowledgeBase | None = None,
                    gateway: LlmGateway | None = None) -> "QaPipeline":
        if kb is None:
            kb = load_kb_any(config.resolved_kb_path())
        retrieval = RetrievalOptions(
            max_bundle_size=config.retrieval.max_bundle_size,
            per_tier_cap=config.retrieval.per_tier_cap,
            prefilter=lexical_score if config.retrieval.prefilter == "lexical" else None,
        )
        generation = GenerationConfig(
            temperature=config.generation.temperature,
            max_related_questions=config.generation.max_related_questions,
            prompt_template_id=config.generation.prompt_template_id,
            model_name=config.gateway_model,
        )
        return cls(
            kb=kb,
            answer_backend=config.answer_backend,
            router_backend=config.router_backend,
            gateway=gateway,
            retrieval=retrieval,
            generation=generation,
            model_name=config.gateway_model,
        )

    def route(self, question: str) -> RouteDecision:
        if self.router_backend == "llm" and self.gateway is not None:
            return route_llm(question, self.kb.catalog, self.gateway, model_name=self.model_name,
                             temperature=self.generation.temperature)
        return route_keyword(question, self.kb.catalog)

    def _generate(self, question: str, bundle) -> DraftResponse:
        if self.answer_backend == "llm" and self.gateway is not None:
            return generate_llm(question, bundle, self.gateway, self.generation)
        return generate_extractive(bundle, self.generation)

    def ask(self, question: str) -> dict:
        """Run the full pipeline; returns the wire-form response dict."""
        started = time.perf_counter()
        route = self.route(question)
        bundle = retrieve(self.kb, route, question, self.retrieval)

        outcome = None
        if bundle.items:
            draft = self._generate(question, bundle)
            outcome = validate(draft, bundle)
            if outcome.status is Status.REJECTED and draft.backend is not GenBackend.EXTRACTIVE:
                # One deterministic recovery attempt before refusing.
                draft = generate_extractive(bundle, self.generation)
                outcome = validate(draft, bundle)

        timing_ms = int((time.perf_counter() - started) * 1000)
        entry = self.kb.catalog.get(route.section_id)
        route_info = {
            "section_id": route.section_id,
            "section_title": entry.title if entry else "",
            "backend": route.backend.value,
        }

        if outcome is None or outcome.status is not Status.ACCEPTED:
            return {
                "status": "refused",
                "concise_answer": REFUSAL_MESSAGE,
                "supporting_evidence": {
                    "citations": [],
                    "clinical_recommendations": [],
                    "evidence_details": [],
                    "related_questions": [],
                    "validation": [],
                },
                "route": route_info,
                "timing_ms": timing_ms,
            }

        final = outcome.final
        assert final is not None
        return {
            "status": "answered",
            "concise_answer": final.concise_answer,
            "supporting_evidence": {
                "citations": [_citation_dict(c) for c in final.citations],
                "clinical_recommendations": list(final.clinical_recommendations),
                "evidence_details": list(final.evidence_details),
                "related_questions": list(final.related_questions),
                "validation": [
                    {
                        "claim_text": r.claim_text,
                        "supporting_unit_ids": list(r.supporting_unit_ids),
                        "matched_tokens": list(r.matched_tokens),
                    }
                    for r in final.validation_report
                ],
            },
            "route": route_info,
            "timing_ms": timing_ms,
        }
