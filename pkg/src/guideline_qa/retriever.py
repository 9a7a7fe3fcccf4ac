"""Assembles the priority-ordered evidence bundle for a routed question.

The tier order (recommendations, then criteria tables, then narrative) is
enforced structurally: an optional similarity scorer may reorder units within
a tier but can never promote one across tiers, and size limits truncate from
the lowest tier upward.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .kb import ContentUnit, KnowledgeBase, units_in_section
from .router import RouteDecision
from .textutils import word_tokens

#: Pluggable similarity capability: (question, unit) -> score >= 0.
SimilarityScorer = Callable[[str, ContentUnit], float]


@dataclass(frozen=True)
class RetrievalOptions:
    max_bundle_size: int = 12
    per_tier_cap: int | None = None
    prefilter: SimilarityScorer | None = None


@dataclass(frozen=True)
class EvidenceBundle:
    question: str
    route: RouteDecision
    items: tuple[ContentUnit, ...]
    truncated: bool

    def unit_ids(self) -> set[str]:
        return {u.unit_id for u in self.items}


def lexical_score(question: str, unit: ContentUnit) -> float:
    """Count of distinct lowercase word tokens shared with the unit text."""
    return float(len(set(word_tokens(question)) & set(word_tokens(unit.flat_text()))))


def retrieve(
    kb: KnowledgeBase,
    route: RouteDecision,
    question: str,
    options: RetrievalOptions = RetrievalOptions(),
) -> EvidenceBundle:
    """Build the evidence bundle for the routed section.

    Raises UnknownSection when the route does not resolve in the KB.
    """
    section_units = units_in_section(kb, route.section_id)

    tiers: dict[int, list[ContentUnit]] = {1: [], 2: [], 3: []}
    for unit in section_units:
        tiers[unit.priority_tier].append(unit)

    items: list[ContentUnit] = []
    for tier in (1, 2, 3):
        units = tiers[tier]
        if options.prefilter is not None:
            # Stable sort: descending score, document order on ties.
            units = sorted(
                enumerate(units), key=lambda pair: (-options.prefilter(question, pair[1]), pair[0])
            )
            units = [u for _, u in units]
        if options.per_tier_cap is not None:
            units = units[: options.per_tier_cap]
        items.extend(units)

    # The list is tier-ordered, so dropping the tail drops the lowest tier,
    # worst-ranked first.
    items = items[: options.max_bundle_size]

    return EvidenceBundle(
        question=question,
        route=route,
        items=tuple(items),
        truncated=len(items) < len(section_units),
    )
