"""Sentence splitting and word tokenization used across generation and validation."""

from __future__ import annotations

import re

# Tokens that never end a sentence even when followed by a capital.
_ABBREVIATIONS = {"e.g", "i.e", "etc", "vs", "cf", "approx", "dr", "st"}

_BOUNDARY_RE = re.compile(r"[.?!]+(?=\s|$)")

STOPWORDS = frozenset(
    """a an and are as at be but by for from has have if in into is it its of on
    or should that the their this to was were what when which with your
    """.split()
)


def _word_before(text: str, idx: int) -> str:
    """Maximal letter/dot run ending at ``idx`` (exclusive), sans trailing dots."""
    start = idx
    while start > 0 and (text[start - 1].isalpha() or text[start - 1] == "."):
        start -= 1
    return text[start:idx].rstrip(".").lower()


def split_sentences(text: str) -> list[str]:
    """Split on ``.``/``?``/``!`` followed by whitespace and a capital or digit.

    Abbreviations like "e.g." never split; dots inside numbers ("2.2") are not
    followed by whitespace and never split either.
    """
    sentences: list[str] = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        end = m.end()
        following = text[end:].lstrip()
        if following and not (following[0].isupper() or following[0].isdigit() or following[0] in "\"'("):
            continue
        if _word_before(text, m.start()) in _ABBREVIATIONS:
            continue
        sentence = text[start:end].strip()
        if sentence:
            sentences.append(sentence)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def word_tokens(text: str) -> list[str]:
    """Lowercase alphanumeric word tokens."""
    return re.findall(r"[a-z0-9]+", text.lower())


def content_words(text: str) -> set[str]:
    """Word tokens minus stopwords and bare numbers."""
    return {
        w for w in word_tokens(text)
        if w not in STOPWORDS and not w.isdigit()
    }
