"""Typed, provenance-annotated guideline knowledge base.

Parses the line-oriented guideline markup (see ``docs/markup.md``) into
immutable content units of three kinds — recommendations, criteria tables,
and narrative — each carrying a clinical priority tier and full provenance.
Also owns the JSON interchange format and the section catalog used for
routing.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .tokens import has_numeric_token


class Kind(Enum):
    RECOMMENDATION = "recommendation"
    CRITERIA_TABLE = "criteria_table"
    NARRATIVE = "narrative"


#: Clinical priority tier is a pure function of kind; recommendations always
#: outrank criteria tables, which outrank narrative.
PRIORITY_TIER = {
    Kind.RECOMMENDATION: 1,
    Kind.CRITERIA_TABLE: 2,
    Kind.NARRATIVE: 3,
}

EVIDENCE_GRADES = frozenset({"A", "B", "C", "E"})

REC_ID_RE = re.compile(r"^Rec ([A-Za-z0-9]+)\.(\d+)([a-z])?$")
TABLE_ID_RE = re.compile(r"^Table ([A-Za-z0-9]+)\.(\d+)$")
NARR_ID_RE = re.compile(r"^Narr ([A-Za-z0-9]+)-(\d{2,})$")


class MalformedMarkup(Exception):
    """Raised on the first offending markup line."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class SchemaError(Exception):
    """Raised on the first violating field of a serialized knowledge base."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class UnknownSection(Exception):
    def __init__(self, section_id: str):
        self.section_id = section_id
        super().__init__(f"unknown section: {section_id!r}")


@dataclass(frozen=True)
class Provenance:
    section_id: str
    section_title: str
    unit_id: str
    subsection: str | None = None
    page: int | None = None
    source_date: str = ""


@dataclass(frozen=True)
class Recommendation:
    rec_id: str
    evidence_grade: str
    text: str


@dataclass(frozen=True)
class TableRow:
    row_index: int
    label: str
    threshold_text: str
    unit: str | None = None


@dataclass(frozen=True)
class CriteriaTable:
    table_id: str
    title: str
    rows: tuple[TableRow, ...]


@dataclass(frozen=True)
class Narrative:
    topic: str
    text: str


@dataclass(frozen=True)
class ContentUnit:
    kind: Kind
    provenance: Provenance
    body: Recommendation | CriteriaTable | Narrative

    @property
    def priority_tier(self) -> int:
        return PRIORITY_TIER[self.kind]

    @property
    def unit_id(self) -> str:
        return self.provenance.unit_id

    @property
    def section_id(self) -> str:
        return self.provenance.section_id

    def flat_text(self) -> str:
        """All human-readable text of the unit, for scoring and matching."""
        if isinstance(self.body, Recommendation):
            return self.body.text
        if isinstance(self.body, CriteriaTable):
            parts = [self.body.title]
            for row in self.body.rows:
                parts.append(row.label)
                parts.append(row.threshold_text)
                if row.unit:
                    parts.append(row.unit)
            return " ".join(p for p in parts if p)
        return f"{self.body.topic} {self.body.text}"

    def topic_phrase(self) -> str:
        """Short phrase naming what the unit is about."""
        if isinstance(self.body, Recommendation):
            words = self.body.text.split()
            return " ".join(words[:6])
        if isinstance(self.body, CriteriaTable):
            return self.body.title
        return self.body.topic


@dataclass(frozen=True)
class Subsection:
    id: str
    title: str


@dataclass(frozen=True)
class SectionEntry:
    section_id: str
    title: str
    subsections: tuple[Subsection, ...] = ()
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class SectionCatalog:
    entries: tuple[SectionEntry, ...] = ()
    default_section_id: str | None = None

    def section_ids(self) -> list[str]:
        return [e.section_id for e in self.entries]

    def get(self, section_id: str) -> SectionEntry | None:
        for entry in self.entries:
            if entry.section_id == section_id:
                return entry
        return None


@dataclass(frozen=True)
class KnowledgeBase:
    units: tuple[ContentUnit, ...]
    catalog: SectionCatalog
    source_name: str = ""
    source_date: str = ""


@dataclass(frozen=True)
class Violation:
    unit_id: str
    rule: str
    message: str


# ---------------------------------------------------------------------------
# Markup parsing
# ---------------------------------------------------------------------------

def _split_fields(payload: str) -> list[str]:
    return [f.strip() for f in payload.split("|")]


class _Parser:
    """Single-pass, line-oriented parser with one-table lookbehind state."""

    def __init__(self) -> None:
        self.source_name = ""
        self.source_date = ""
        self.default_section: str | None = None
        self.sections: list[dict] = []
        self.units: list[ContentUnit] = []
        self.seen_unit_ids: set[str] = set()
        self.current_section: dict | None = None
        self.current_subsection: str | None = None
        self.current_page: int | None = None
        self.open_table: dict | None = None

    def fail(self, line_no: int, reason: str) -> None:
        raise MalformedMarkup(line_no, reason)

    def close_table(self) -> None:
        if self.open_table is None:
            return
        t = self.open_table
        body = CriteriaTable(table_id=t["id"], title=t["title"], rows=tuple(t["rows"]))
        self.units.append(ContentUnit(kind=Kind.CRITERIA_TABLE, provenance=t["prov"], body=body))
        self.open_table = None

    def provenance(self, unit_id: str, line_no: int) -> Provenance:
        if self.current_section is None:
            self.fail(line_no, "content unit appears before any @section")
        if unit_id in self.seen_unit_ids:
            self.fail(line_no, f"duplicate unit_id {unit_id!r}")
        self.seen_unit_ids.add(unit_id)
        return Provenance(
            section_id=self.current_section["id"],
            section_title=self.current_section["title"],
            unit_id=unit_id,
            subsection=self.current_subsection,
            page=self.current_page,
            source_date=self.source_date,
        )

    def handle(self, line_no: int, directive: str, payload: str) -> None:
        if directive != "@row":
            self.close_table()
        fields = _split_fields(payload)

        if directive == "@source":
            if len(fields) != 2:
                self.fail(line_no, "@source needs <name> | <iso-date>")
            self.source_name, self.source_date = fields
        elif directive == "@default":
            self.default_section = payload.strip()
        elif directive == "@section":
            if len(fields) != 2 or not fields[0]:
                self.fail(line_no, "@section needs <id> | <title>")
            if any(s["id"] == fields[0] for s in self.sections):
                self.fail(line_no, f"duplicate section id {fields[0]!r}")
            self.current_section = {
                "id": fields[0], "title": fields[1], "subsections": [], "keywords": [], "line": line_no,
            }
            self.current_subsection = None
            self.sections.append(self.current_section)
        elif directive == "@keywords":
            if self.current_section is None:
                self.fail(line_no, "@keywords appears before any @section")
            kws = [k.strip().lower() for k in payload.split(",") if k.strip()]
            if not kws:
                self.fail(line_no, "@keywords needs at least one keyword")
            self.current_section["keywords"].extend(kws)
        elif directive == "@subsection":
            if self.current_section is None:
                self.fail(line_no, "@subsection appears before any @section")
            if len(fields) != 2 or not fields[0]:
                self.fail(line_no, "@subsection needs <id> | <title>")
            self.current_section["subsections"].append(Subsection(id=fields[0], title=fields[1]))
            self.current_subsection = fields[0]
        elif directive == "@page":
            try:
                page = int(payload.strip())
            except ValueError:
                page = 0
            if page < 1:
                self.fail(line_no, "@page needs a positive integer")
            self.current_page = page
        elif directive == "@rec":
            if len(fields) != 3:
                self.fail(line_no, "@rec needs <rec_id> | <grade> | <text>")
            rec_id, grade, text = fields
            m = REC_ID_RE.match(rec_id)
            if m is None:
                self.fail(line_no, f"rec_id {rec_id!r} does not match 'Rec <sec>.<num>[letter]'")
            if self.current_section is None:
                self.fail(line_no, "content unit appears before any @section")
            if m.group(1) != self.current_section["id"]:
                self.fail(
                    line_no,
                    f"rec_id {rec_id!r} does not belong to section {self.current_section['id']!r}",
                )
            if grade not in EVIDENCE_GRADES:
                self.fail(line_no, f"invalid evidence grade {grade!r} (expected one of A, B, C, E)")
            prov = self.provenance(rec_id, line_no)
            body = Recommendation(rec_id=rec_id, evidence_grade=grade, text=text)
            self.units.append(ContentUnit(kind=Kind.RECOMMENDATION, provenance=prov, body=body))
        elif directive == "@table":
            if len(fields) != 2:
                self.fail(line_no, "@table needs <table_id> | <title>")
            table_id, title = fields
            if TABLE_ID_RE.match(table_id) is None:
                self.fail(line_no, f"table_id {table_id!r} does not match 'Table <sec>.<n>'")
            prov = self.provenance(table_id, line_no)
            self.open_table = {"id": table_id, "title": title, "rows": [], "prov": prov}
        elif directive == "@row":
            if self.open_table is None:
                self.fail(line_no, "@row outside of a @table block")
            if len(fields) not in (2, 3) or not fields[0]:
                self.fail(line_no, "@row needs <label> | <threshold_text> [| <unit>]")
            label, threshold = fields[0], fields[1]
            unit = fields[2] if len(fields) == 3 else None
            if threshold and not has_numeric_token(threshold):
                self.fail(line_no, f"threshold_text {threshold!r} contains no numeric token")
            self.open_table["rows"].append(
                TableRow(
                    row_index=len(self.open_table["rows"]) + 1,
                    label=label,
                    threshold_text=threshold,
                    unit=unit,
                )
            )
        elif directive == "@narr":
            if len(fields) != 3:
                self.fail(line_no, "@narr needs <narr_id> | <topic> | <text>")
            narr_id, topic, text = fields
            if NARR_ID_RE.match(narr_id) is None:
                self.fail(line_no, f"narr_id {narr_id!r} does not match 'Narr <sec>-<nn>'")
            prov = self.provenance(narr_id, line_no)
            self.units.append(
                ContentUnit(kind=Kind.NARRATIVE, provenance=prov, body=Narrative(topic=topic, text=text))
            )
        else:
            self.fail(line_no, f"unknown directive {directive!r}")

    def finish(self) -> KnowledgeBase:
        self.close_table()
        entries = tuple(
            SectionEntry(
                section_id=s["id"],
                title=s["title"],
                subsections=tuple(s["subsections"]),
                keywords=tuple(s["keywords"]),
            )
            for s in self.sections
        )
        default = self.default_section
        if default is None and entries:
            default = entries[0].section_id
        if default is not None and all(e.section_id != default for e in entries):
            self.fail(0, f"@default names unknown section {default!r}")
        catalog = SectionCatalog(entries=entries, default_section_id=default)
        for section, entry in zip(self.sections, entries):
            if not entry.keywords:
                self.fail(section["line"], f"section {entry.section_id!r} has no @keywords")
        return KnowledgeBase(
            units=tuple(self.units),
            catalog=catalog,
            source_name=self.source_name,
            source_date=self.source_date,
        )


def parse_guideline_markup(markup_text: str) -> KnowledgeBase:
    """Parse guideline markup into a knowledge base; deterministic.

    Raises MalformedMarkup naming the first offending line.
    """
    parser = _Parser()
    for line_no, line in enumerate(markup_text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if not stripped.startswith("@"):
            raise MalformedMarkup(line_no, f"expected a directive, got {stripped[:40]!r}")
        head, _, payload = stripped.partition(" ")
        parser.handle(line_no, head, payload)
    return parser.finish()


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def _provenance_dict(p: Provenance) -> dict:
    return {
        "section_id": p.section_id,
        "section_title": p.section_title,
        "subsection": p.subsection,
        "unit_id": p.unit_id,
        "page": p.page,
        "source_date": p.source_date,
    }


def _unit_dict(u: ContentUnit) -> dict:
    if isinstance(u.body, Recommendation):
        body = {"rec_id": u.body.rec_id, "evidence_grade": u.body.evidence_grade, "text": u.body.text}
    elif isinstance(u.body, CriteriaTable):
        body = {
            "table_id": u.body.table_id,
            "title": u.body.title,
            "rows": [
                {"row_index": r.row_index, "label": r.label, "threshold_text": r.threshold_text, "unit": r.unit}
                for r in u.body.rows
            ],
        }
    else:
        body = {"topic": u.body.topic, "text": u.body.text}
    return {"kind": u.kind.value, "provenance": _provenance_dict(u.provenance), "body": body}


def serialize_kb(kb: KnowledgeBase) -> bytes:
    """Serialize to the JSON interchange form; byte-identical across runs."""
    doc = {
        "source_name": kb.source_name,
        "source_date": kb.source_date,
        "catalog": {
            "default_section_id": kb.catalog.default_section_id,
            "entries": [
                {
                    "section_id": e.section_id,
                    "title": e.title,
                    "subsections": [{"id": s.id, "title": s.title} for s in e.subsections],
                    "keywords": list(e.keywords),
                }
                for e in kb.catalog.entries
            ],
        },
        "units": [_unit_dict(u) for u in kb.units],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _expect(doc: dict, key: str, types, path: str, allow_none=False):
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing field")
    value = doc[key]
    if value is None and allow_none:
        return None
    if not isinstance(value, types):
        raise SchemaError(f"{path}.{key}", f"expected {types}, got {type(value).__name__}")
    return value


def _load_provenance(doc, path: str) -> Provenance:
    if not isinstance(doc, dict):
        raise SchemaError(path, "provenance must be an object")
    page = _expect(doc, "page", int, path, allow_none=True)
    if page is not None and (isinstance(page, bool) or page < 1):
        raise SchemaError(f"{path}.page", "must be a positive integer or null")
    return Provenance(
        section_id=_expect(doc, "section_id", str, path),
        section_title=_expect(doc, "section_title", str, path),
        subsection=_expect(doc, "subsection", str, path, allow_none=True),
        unit_id=_expect(doc, "unit_id", str, path),
        page=page,
        source_date=_expect(doc, "source_date", str, path),
    )


def _load_unit(doc, path: str) -> ContentUnit:
    if not isinstance(doc, dict):
        raise SchemaError(path, "unit must be an object")
    kind_value = _expect(doc, "kind", str, path)
    try:
        kind = Kind(kind_value)
    except ValueError:
        raise SchemaError(f"{path}.kind", f"unknown kind {kind_value!r}")
    prov = _load_provenance(_expect(doc, "provenance", dict, path), f"{path}.provenance")
    body_doc = _expect(doc, "body", dict, path)
    body_path = f"{path}.body"
    if kind is Kind.RECOMMENDATION:
        grade = _expect(body_doc, "evidence_grade", str, body_path)
        if grade not in EVIDENCE_GRADES:
            raise SchemaError(f"{body_path}.evidence_grade", f"invalid grade {grade!r}")
        body = Recommendation(
            rec_id=_expect(body_doc, "rec_id", str, body_path),
            evidence_grade=grade,
            text=_expect(body_doc, "text", str, body_path),
        )
    elif kind is Kind.CRITERIA_TABLE:
        rows_doc = _expect(body_doc, "rows", list, body_path)
        rows = []
        for i, row in enumerate(rows_doc):
            row_path = f"{body_path}.rows[{i}]"
            if not isinstance(row, dict):
                raise SchemaError(row_path, "row must be an object")
            idx = _expect(row, "row_index", int, row_path)
            if isinstance(idx, bool) or idx < 1:
                raise SchemaError(f"{row_path}.row_index", "must be a positive integer")
            rows.append(
                TableRow(
                    row_index=idx,
                    label=_expect(row, "label", str, row_path),
                    threshold_text=_expect(row, "threshold_text", str, row_path),
                    unit=_expect(row, "unit", str, row_path, allow_none=True),
                )
            )
        body = CriteriaTable(
            table_id=_expect(body_doc, "table_id", str, body_path),
            title=_expect(body_doc, "title", str, body_path),
            rows=tuple(rows),
        )
    else:
        body = Narrative(
            topic=_expect(body_doc, "topic", str, body_path),
            text=_expect(body_doc, "text", str, body_path),
        )
    return ContentUnit(kind=kind, provenance=prov, body=body)


def load_kb(serialized: bytes | str) -> KnowledgeBase:
    """Load the JSON interchange form; inverse of serialize_kb.

    Raises SchemaError identifying the first violating field.
    """
    if isinstance(serialized, bytes):
        serialized = serialized.decode("utf-8")
    try:
        doc = json.loads(serialized)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("$", "top level must be an object")

    catalog_doc = _expect(doc, "catalog", dict, "$")
    entries = []
    for i, entry in enumerate(_expect(catalog_doc, "entries", list, "$.catalog")):
        entry_path = f"$.catalog.entries[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(entry_path, "entry must be an object")
        subsections = []
        for j, sub in enumerate(_expect(entry, "subsections", list, entry_path)):
            sub_path = f"{entry_path}.subsections[{j}]"
            if not isinstance(sub, dict):
                raise SchemaError(sub_path, "subsection must be an object")
            subsections.append(
                Subsection(id=_expect(sub, "id", str, sub_path), title=_expect(sub, "title", str, sub_path))
            )
        keywords = _expect(entry, "keywords", list, entry_path)
        if not all(isinstance(k, str) for k in keywords):
            raise SchemaError(f"{entry_path}.keywords", "keywords must be strings")
        entries.append(
            SectionEntry(
                section_id=_expect(entry, "section_id", str, entry_path),
                title=_expect(entry, "title", str, entry_path),
                subsections=tuple(subsections),
                keywords=tuple(keywords),
            )
        )
    default = _expect(catalog_doc, "default_section_id", str, "$.catalog", allow_none=True)
    catalog = SectionCatalog(entries=tuple(entries), default_section_id=default)

    units = []
    for i, unit_doc in enumerate(_expect(doc, "units", list, "$")):
        units.append(_load_unit(unit_doc, f"$.units[{i}]"))

    kb = KnowledgeBase(
        units=tuple(units),
        catalog=catalog,
        source_name=_expect(doc, "source_name", str, "$"),
        source_date=_expect(doc, "source_date", str, "$"),
    )
    violations = validate_kb(kb)
    if violations:
        v = violations[0]
        raise SchemaError(f"$[{v.unit_id}]", f"{v.rule}: {v.message}")
    return kb


# ---------------------------------------------------------------------------
# Invariant checking and section access
# ---------------------------------------------------------------------------

def validate_kb(kb: KnowledgeBase) -> list[Violation]:
    """Mechanized invariant checks; empty list iff the KB is well-formed."""
    violations: list[Violation] = []

    seen_sections: set[str] = set()
    for entry in kb.catalog.entries:
        if entry.section_id in seen_sections:
            violations.append(
                Violation(entry.section_id, "catalog-unique-sections", f"duplicate section_id {entry.section_id!r}")
            )
        seen_sections.add(entry.section_id)
        if not entry.keywords:
            violations.append(
                Violation(entry.section_id, "catalog-keywords", f"section {entry.section_id!r} has no keywords")
            )

    seen_units: set[str] = set()
    for unit in kb.units:
        uid = unit.unit_id
        if not uid:
            violations.append(Violation(uid, "unit-id-nonempty", "unit_id is empty"))
        elif uid in seen_units:
            violations.append(Violation(uid, "unit-id-unique", f"duplicate unit_id {uid!r}"))
        seen_units.add(uid)

        if kb.catalog.get(unit.section_id) is None:
            violations.append(
                Violation(uid, "section-resolves", f"section_id {unit.section_id!r} not in catalog")
            )

        if isinstance(unit.body, Recommendation):
            m = REC_ID_RE.match(unit.body.rec_id)
            if m is None:
                violations.append(Violation(uid, "rec-id-grammar", f"rec_id {unit.body.rec_id!r} malformed"))
            elif m.group(1) != unit.section_id:
                violations.append(
                    Violation(uid, "rec-section-match", f"rec_id {unit.body.rec_id!r} not in section {unit.section_id!r}")
                )
            if unit.body.evidence_grade not in EVIDENCE_GRADES:
                violations.append(
                    Violation(uid, "evidence-grade", f"invalid grade {unit.body.evidence_grade!r}")
                )
        elif isinstance(unit.body, CriteriaTable):
            for i, row in enumerate(unit.body.rows):
                if row.row_index != i + 1:
                    violations.append(
                        Violation(uid, "row-index-consecutive", f"row {i} has index {row.row_index}, expected {i + 1}")
                    )
                    break
            for row in unit.body.rows:
                if row.threshold_text and not has_numeric_token(row.threshold_text):
                    violations.append(
                        Violation(uid, "threshold-numeric-token", f"threshold_text {row.threshold_text!r} has no numeric token")
                    )

    return violations


def units_in_section(
    kb: KnowledgeBase, section_id: str, kinds: Iterable[Kind] | None = None
) -> list[ContentUnit]:
    """Units of a section in (priority tier, document order); stable."""
    if kb.catalog.get(section_id) is None:
        raise UnknownSection(section_id)
    wanted = set(kinds) if kinds is not None else set(Kind)
    selected = [u for u in kb.units if u.section_id == section_id and u.kind in wanted]
    return sorted(selected, key=lambda u: u.priority_tier)  # sort is stable: doc order kept
