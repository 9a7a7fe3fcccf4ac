"""Numeric token grammar shared by the knowledge base and the answer validator.

A numeric token is a value, range, or percentage with an optional clinical
unit (``100–125 mg/dL``, ``5.7–6.4%``, ``92 mg/dL``). Tokens are matched
left-to-right, non-overlapping, longest-match-first. Normalization maps all
dash variants to ``-``, collapses whitespace, and lowercases units except
``mg/dL``, so that ``100--125 mg/dL`` and ``100–125 mg/dL`` compare equal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class TokenKind(Enum):
    VALUE = "value"
    RANGE = "range"
    PERCENT = "percent"


@dataclass(frozen=True)
class NumericToken:
    """One numeric fact extracted from text."""

    raw: str
    normalized: str
    kind: TokenKind


_NUM = r"\d+(?:\.\d+)?"
# Longest variants first so `--` wins over `-`.
_DASH = r"(?:--|–|—|-)"

# Unit words ordered longest-first. Single-letter and everyday-word units
# (g, in) are deliberately excluded: they collide with prose.
_UNIT_WORDS = ("mg/dL", "mmol/L", "kg/m²", "kg/m2", "mmHg", "lbs", "lb", "kg", "cm")
_UNIT_ALT = "|".join(re.escape(u) for u in _UNIT_WORDS)

# Canonical spellings; anything not listed is simply lowercased.
_UNIT_CANONICAL = {"mg/dl": "mg/dL", "kg/m2": "kg/m²"}

_TOKEN_RE = re.compile(
    rf"(?<![A-Za-z0-9.])"
    rf"(?P<a>{_NUM})"
    rf"(?:\s*{_DASH}\s*(?P<b>{_NUM})|\s+to\s+(?P<b2>{_NUM}))?"
    rf"(?:(?P<pct>\s?%)|(?P<unit>[ \t]*(?:{_UNIT_ALT}))(?![A-Za-z0-9²]))?",
    re.IGNORECASE,
)

# A number glued to a hyphenated word ("2-hour", "75-g") is part of the word,
# not a numeric token.
_HYPHEN_WORD_RE = re.compile(rf"{_DASH}[A-Za-z]")


def _canonical_unit(unit: str) -> str:
    lowered = unit.lower()
    return _UNIT_CANONICAL.get(lowered, lowered)


def normalize_numeric_token(text: str) -> str:
    """Canonicalize a numeric phrase; idempotent on its own output."""
    s = re.sub(r"--|–|—", "-", text)
    s = " ".join(s.split())
    s = re.sub(r"(?<=\d)\s*-\s*(?=\d)", "-", s)
    s = re.sub(r"(?<=\d)\s+to\s+(?=\d)", "-", s, flags=re.IGNORECASE)
    s = re.sub(r"\s+%", "%", s)

    def _sub_unit(m: re.Match) -> str:
        return _canonical_unit(m.group(0))

    s = re.sub(rf"(?:{_UNIT_ALT})(?![A-Za-z0-9²])", _sub_unit, s, flags=re.IGNORECASE)
    return s


def extract_numeric_tokens(text: str) -> list[NumericToken]:
    """Extract all numeric tokens from ``text`` in reading order."""
    tokens: list[NumericToken] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.search(text, pos)
        if m is None:
            break
        rest = text[m.end():]
        # Reject numbers that are really part of a word: "2-hour", "2h".
        bare_number = m.group("b") is None and m.group("b2") is None and \
            m.group("pct") is None and m.group("unit") is None
        if bare_number and (_HYPHEN_WORD_RE.match(rest) or (rest[:1].isalpha())):
            pos = m.end() + 1
            continue
        raw = m.group(0)
        if m.group("b") or m.group("b2"):
            kind = TokenKind.RANGE
        elif m.group("pct"):
            kind = TokenKind.PERCENT
        else:
            kind = TokenKind.VALUE
        tokens.append(NumericToken(raw=raw, normalized=normalize_numeric_token(raw), kind=kind))
        pos = m.end()
    return tokens


def token_set(text: str) -> set[str]:
    """Normalized token strings found in ``text``."""
    return {t.normalized for t in extract_numeric_tokens(text)}


def has_numeric_token(text: str) -> bool:
    return bool(extract_numeric_tokens(text))
