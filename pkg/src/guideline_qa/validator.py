"""Release gate for drafted answers.

Three mandatory constraints: every claim must be attributable to cited
evidence, every numeric token must match retrieved values exactly (after
dash/whitespace normalization), and anything unsupported turns into the
graceful refusal message instead of text. Purely mechanical — no model call —
so the gate is deterministic and testable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .generator import Citation, DraftResponse
from .kb import ContentUnit
from .retriever import EvidenceBundle
from .textutils import content_words
from .tokens import (  # noqa: F401  (re-exported contract surface)
    NumericToken,
    TokenKind,
    extract_numeric_tokens,
    normalize_numeric_token,
    token_set,
)

REFUSAL_MESSAGE = "Insufficient guideline evidence for this question"


class ClaimOrigin(Enum):
    CONCISE_ANSWER = "concise_answer"
    CLINICAL_RECOMMENDATION = "clinical_recommendation"
    EVIDENCE_DETAIL = "evidence_detail"


class Status(Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    REFUSAL = "refusal"


@dataclass
class Claim:
    text: str
    origin: ClaimOrigin
    supporting_unit_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Rejection:
    claim: Claim | None
    rule: str
    detail: str


@dataclass(frozen=True)
class ClaimReport:
    claim_text: str
    supporting_unit_ids: tuple[str, ...]
    matched_tokens: tuple[str, ...]


@dataclass(frozen=True)
class FinalResponse:
    concise_answer: str
    citations: tuple[Citation, ...]
    clinical_recommendations: tuple[str, ...]
    evidence_details: tuple[str, ...]
    related_questions: tuple[str, ...]
    validation_report: tuple[ClaimReport, ...]


@dataclass(frozen=True)
class ValidationOutcome:
    status: Status
    final: FinalResponse | None
    rejections: tuple[Rejection, ...]
    refusal_message: str | None = None


def segment_claims(draft: DraftResponse) -> list[Claim]:
    """One claim per concise-answer sentence, recommendation, and detail."""
    from .textutils import split_sentences

    claims = [
        Claim(text=s, origin=ClaimOrigin.CONCISE_ANSWER)
        for s in split_sentences(draft.concise_answer)
    ]
    claims.extend(
        Claim(text=t, origin=ClaimOrigin.CLINICAL_RECOMMENDATION)
        for t in draft.clinical_recommendations
    )
    claims.extend(
        Claim(text=t, origin=ClaimOrigin.EVIDENCE_DETAIL) for t in draft.evidence_details
    )
    return claims


def _cited_bundle_units(draft: DraftResponse, bundle: EvidenceBundle) -> list[ContentUnit]:
    by_id = {u.unit_id: u for u in bundle.items}
    seen: list[ContentUnit] = []
    for citation in draft.citations:
        unit = by_id.get(citation.unit_id)
        if unit is not None and unit not in seen:
            seen.append(unit)
    return seen


def validate(draft: DraftResponse, bundle: EvidenceBundle) -> ValidationOutcome:
    """Check citation coverage and exact numeric matching; refusal when empty.

    Outcome statuses, never exceptions: Accepted carries the FinalResponse
    with a per-claim report, Rejected lists the violated rules, Refusal
    carries the fixed refusal message verbatim.
    """
    claims = segment_claims(draft)
    cited_units = _cited_bundle_units(draft, bundle)
    unit_tokens = {u.unit_id: token_set(u.flat_text()) for u in cited_units}
    unit_words = {u.unit_id: content_words(u.flat_text()) for u in cited_units}

    # Linkage: which cited units a claim can be attributed to (shared numeric
    # token, or shared content word for number-free attribution).
    reports: list[ClaimReport] = []
    rejections: list[Rejection] = []
    any_attributable = False

    for claim in claims:
        tokens = token_set(claim.text)
        words = content_words(claim.text)
        linked: list[str] = []
        matched: set[str] = set()
        for unit in cited_units:
            uid = unit.unit_id
            shared_tokens = tokens & unit_tokens[uid]
            if shared_tokens or (words & unit_words[uid]):
                linked.append(uid)
                matched |= shared_tokens
        claim.supporting_unit_ids = tuple(linked)
        if linked:
            any_attributable = True

        missing = tokens - set().union(*unit_tokens.values()) if unit_tokens else tokens
        if missing:
            rejections.append(
                Rejection(
                    claim=claim,
                    rule="numeric-mismatch",
                    detail=f"numeric tokens not found in cited evidence: {', '.join(sorted(missing))}",
                )
            )
        elif not linked:
            rejections.append(
                Rejection(claim=claim, rule="uncited-claim", detail="no cited unit supports this claim")
            )
        else:
            reports.append(
                ClaimReport(
                    claim_text=claim.text,
                    supporting_unit_ids=tuple(linked),
                    matched_tokens=tuple(sorted(matched)),
                )
            )

    if not bundle.items or not any_attributable:
        return ValidationOutcome(
            status=Status.REFUSAL, final=None, rejections=(), refusal_message=REFUSAL_MESSAGE
        )

    bundle_ids = bundle.unit_ids()
    for citation in draft.citations:
        if citation.unit_id not in bundle_ids:
            rejections.append(
                Rejection(
                    claim=None,
                    rule="dangling-citation",
                    detail=f"citation {citation.display!r} references a unit outside the bundle",
                )
            )

    if rejections:
        return ValidationOutcome(status=Status.REJECTED, final=None, rejections=tuple(rejections))

    final = FinalResponse(
        concise_answer=draft.concise_answer,
        citations=draft.citations,
        clinical_recommendations=draft.clinical_recommendations,
        evidence_details=draft.evidence_details,
        related_questions=draft.related_questions,
        validation_report=tuple(reports),
    )
    return ValidationOutcome(status=Status.ACCEPTED, final=final, rejections=())
