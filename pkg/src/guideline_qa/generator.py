"""Builds the five-part draft response from an evidence bundle.

Two backends: a deterministic extractive template that quotes bundle text
verbatim (so every number is grounded by construction), and a chat-model
backend that parses a field-tagged reply and falls back to the extractive
path after one failed repair round. Grounding is *checked* downstream by the
validator; this module only produces drafts.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum

from .kb import ContentUnit, CriteriaTable, Kind, Narrative, Recommendation, TableRow
from .llm_gateway import ChatRequest, GatewayError, LlmGateway
from .prompts import load_prompt
from .retriever import EvidenceBundle
from .textutils import STOPWORDS, split_sentences, word_tokens

logger = logging.getLogger(__name__)


class GenBackend(Enum):
    EXTRACTIVE = "extractive"
    LLM = "llm"


class EmptyBundle(Exception):
    pass


class RowIndexRequired(Exception):
    pass


class RowIndexForbidden(Exception):
    pass


@dataclass(frozen=True)
class Citation:
    display: str
    unit_id: str
    row_index: int | None = None


@dataclass(frozen=True)
class DraftResponse:
    concise_answer: str
    citations: tuple[Citation, ...]
    clinical_recommendations: tuple[str, ...]
    evidence_details: tuple[str, ...]
    related_questions: tuple[str, ...]
    backend: GenBackend


@dataclass(frozen=True)
class GenerationConfig:
    temperature: float = 0.1
    max_related_questions: int = 3
    prompt_template_id: str = "generation-v1"
    model_name: str = "gpt-4o"


# Matches any rendered citation display; used to keep the concise answer
# citation-free.
CITATION_GRAMMAR_RE = re.compile(
    r"Rec [A-Za-z0-9]+\.\d+[a-z]?(?: \([ABCE]\))?"
    r"|Table [A-Za-z0-9]+\.\d+, row \d+"
    r"|Narr [A-Za-z0-9]+-\d{2,}"
)

_REC_DISPLAY_RE = re.compile(r"^(Rec [A-Za-z0-9]+\.\d+[a-z]?) \(([ABCE])\)$")
_TABLE_DISPLAY_RE = re.compile(r"^(Table [A-Za-z0-9]+\.\d+), row (\d+)$")
_NARR_DISPLAY_RE = re.compile(r"^(Narr [A-Za-z0-9]+-\d{2,})$")


def format_citation(unit: ContentUnit, row_index: int | None = None) -> Citation:
    """Pure formatter from unit (+ row) to the citation display grammar."""
    if unit.kind is Kind.CRITERIA_TABLE:
        if row_index is None:
            raise RowIndexRequired(unit.unit_id)
        return Citation(display=f"{unit.unit_id}, row {row_index}", unit_id=unit.unit_id, row_index=row_index)
    if row_index is not None:
        raise RowIndexForbidden(unit.unit_id)
    if unit.kind is Kind.RECOMMENDATION:
        assert isinstance(unit.body, Recommendation)
        return Citation(display=f"{unit.unit_id} ({unit.body.evidence_grade})", unit_id=unit.unit_id)
    return Citation(display=unit.unit_id, unit_id=unit.unit_id)


def parse_citation(display: str) -> Citation | None:
    """Inverse of format_citation; None when the display is ungrammatical."""
    display = display.strip()
    m = _REC_DISPLAY_RE.match(display)
    if m:
        return Citation(display=display, unit_id=m.group(1))
    m = _TABLE_DISPLAY_RE.match(display)
    if m:
        return Citation(display=display, unit_id=m.group(1), row_index=int(m.group(2)))
    m = _NARR_DISPLAY_RE.match(display)
    if m:
        return Citation(display=display, unit_id=m.group(1))
    return None


def _as_sentence(text: str) -> str:
    text = text.strip()
    if text and text[-1] not in ".?!":
        text += "."
    if text and text[0].islower():
        text = text[0].upper() + text[1:]
    return text


def _leading_content_words(text: str, count: int) -> list[str]:
    seen: list[str] = []
    for word in word_tokens(text):
        if word in STOPWORDS or word.isdigit() or word in seen:
            continue
        seen.append(word)
        if len(seen) == count:
            break
    return seen or ["guidance"]


def _first_row(table: ContentUnit) -> TableRow | None:
    assert isinstance(table.body, CriteriaTable)
    for row in table.body.rows:
        if row.threshold_text:
            return row
    return None


def generate_extractive(bundle: EvidenceBundle, config: GenerationConfig = GenerationConfig()) -> DraftResponse:
    """Deterministic template: quotes the top recommendation and table rows.

    Raises EmptyBundle when there is nothing to quote (the pipeline turns
    that into a refusal before generation is ever reached).
    """
    if not bundle.items:
        raise EmptyBundle()

    recs = [u for u in bundle.items if u.kind is Kind.RECOMMENDATION]
    tables = [u for u in bundle.items if u.kind is Kind.CRITERIA_TABLE]
    narrs = [u for u in bundle.items if u.kind is Kind.NARRATIVE]

    answer_units: list[ContentUnit] = []
    sentences: list[str] = []

    rec_sents: list[str] = []
    if recs:
        assert isinstance(recs[0].body, Recommendation)
        rec_sents = split_sentences(recs[0].body.text)
        if rec_sents:
            sentences.append(_as_sentence(rec_sents[0]))
            answer_units.append(recs[0])

    top_row = _first_row(tables[0]) if tables else None
    if top_row is not None:
        sentences.append(_as_sentence(f"Confirm against the {top_row.label} criterion of {top_row.threshold_text}"))
        answer_units.append(tables[0])

    if len(sentences) < 2 and len(rec_sents) > 1:
        sentences.append(_as_sentence(rec_sents[1]))
    if len(sentences) < 2 and narrs:
        assert isinstance(narrs[0].body, Narrative)
        narr_sents = split_sentences(narrs[0].body.text)[: 2 - len(sentences)]
        if narr_sents:
            sentences.extend(_as_sentence(s) for s in narr_sents)
            answer_units.append(narrs[0])

    # Pad to the two-sentence floor with phrases quoted from the top item.
    fallback = 0
    while len(sentences) < 2:
        source = answer_units[0] if answer_units else bundle.items[0]
        if source not in answer_units:
            answer_units.append(source)
        if fallback == 0:
            words = _leading_content_words(source.flat_text(), 3)
            sentences.append(_as_sentence(f"Key terms from the cited guidance: {', '.join(words)}"))
        else:
            topic = source.topic_phrase().strip().rstrip(".?!")
            sentences.append(_as_sentence(f"Review the cited entry on {topic} for full context"))
        fallback += 1

    concise_answer = CITATION_GRAMMAR_RE.sub("the cited source", " ".join(sentences[:3])).strip()

    citations: list[Citation] = []
    quoted_narrs: set[str] = {u.unit_id for u in answer_units if u.kind is Kind.NARRATIVE}
    remaining = [n for n in narrs if n.unit_id not in quoted_narrs]
    related = [
        _topic_question(n) for n in remaining[: config.max_related_questions]
    ]
    cited_related = set(n.unit_id for n in remaining[: config.max_related_questions])

    for unit in bundle.items:
        if unit.kind is Kind.RECOMMENDATION:
            citations.append(format_citation(unit))
        elif unit.kind is Kind.CRITERIA_TABLE:
            assert isinstance(unit.body, CriteriaTable)
            for row in unit.body.rows:
                if row.threshold_text:
                    citations.append(format_citation(unit, row.row_index))
        elif unit.unit_id in quoted_narrs or unit.unit_id in cited_related:
            citations.append(format_citation(unit))

    clinical_recommendations = tuple(
        r.body.text for r in recs if isinstance(r.body, Recommendation)
    )
    evidence_details = tuple(
        f"{row.label}: {row.threshold_text}" if row.label else row.threshold_text
        for t in tables
        if isinstance(t.body, CriteriaTable)
        for row in t.body.rows
        if row.threshold_text
    )

    return DraftResponse(
        concise_answer=concise_answer,
        citations=tuple(citations),
        clinical_recommendations=clinical_recommendations,
        evidence_details=evidence_details,
        related_questions=tuple(related),
        backend=GenBackend.EXTRACTIVE,
    )


def _topic_question(unit: ContentUnit) -> str:
    topic = unit.topic_phrase().strip().rstrip(".?!")
    if topic and topic[0].isupper() and not topic[:2].isupper():
        topic = topic[0].lower() + topic[1:]
    return f"What does the guideline say about {topic}?"


# ---------------------------------------------------------------------------
# Chat-model backend
# ---------------------------------------------------------------------------

_HEADERS = ("ANSWER", "CITATIONS", "RECOMMENDATIONS", "EVIDENCE", "RELATED")
_HEADER_RE = re.compile(rf"^({'|'.join(_HEADERS)}):\s*$", re.MULTILINE)


def _evidence_block(bundle: EvidenceBundle) -> str:
    blocks = []
    for unit in bundle.items:
        blocks.append(f"[{unit.unit_id}] (tier {unit.priority_tier})\n{unit.flat_text()}")
    return "\n\n".join(blocks)


def parse_generation_reply(text: str) -> DraftResponse | None:
    """Strict parse of the field-tagged reply format; None when unusable."""
    found: dict[str, str] = {}
    matches = list(_HEADER_RE.finditer(text))
    if not matches:
        return None
    for i, m in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
        found[m.group(1)] = text[m.end():end].strip()

    answer = found.get("ANSWER", "").strip()
    if not answer or CITATION_GRAMMAR_RE.search(answer):
        return None
    if len(split_sentences(answer)) not in (2, 3):
        return None

    def items(section: str) -> list[str]:
        lines = [ln.strip() for ln in found.get(section, "").splitlines()]
        return [ln[2:].strip() for ln in lines if ln.startswith("- ")]

    citations = []
    for line in items("CITATIONS"):
        citation = parse_citation(line)
        if citation is None:
            return None
        citations.append(citation)
    if not citations:
        return None

    return DraftResponse(
        concise_answer=answer,
        citations=tuple(citations),
        clinical_recommendations=tuple(items("RECOMMENDATIONS")),
        evidence_details=tuple(items("EVIDENCE")),
        related_questions=tuple(items("RELATED")),
        backend=GenBackend.LLM,
    )


def generate_llm(
    question: str,
    bundle: EvidenceBundle,
    gateway: LlmGateway,
    config: GenerationConfig = GenerationConfig(),
) -> DraftResponse:
    """Chat-model generation with one repair round, then extractive fallback."""
    if not bundle.items:
        raise EmptyBundle()

    prompt = load_prompt(
        config.prompt_template_id, question=question, evidence=_evidence_block(bundle)
    )
    prompts = [
        prompt,
        load_prompt("generation-repair-v1", previous_prompt=prompt),
    ]
    for attempt, user_text in enumerate(prompts):
        request = ChatRequest(
            model_name=config.model_name,
            system_text="You answer clinical questions strictly from supplied guideline evidence.",
            user_text=user_text,
            temperature=config.temperature,
            max_output_tokens=1024,
            request_id=f"gen-{attempt}-{abs(hash(question)) % 10**8:08d}",
        )
        try:
            reply = gateway.chat(request)
        except GatewayError as exc:
            logger.warning("generation gateway failed (%s); extractive fallback", exc.kind.value)
            return generate_extractive(bundle, config)
        draft = parse_generation_reply(reply.text)
        if draft is not None:
            return draft
        logger.warning("unparseable generation reply (attempt %d)", attempt + 1)

    return generate_extractive(bundle, config)
