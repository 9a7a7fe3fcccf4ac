from hypothesis import given, strategies as st

from guideline_qa.tokens import (
    TokenKind,
    extract_numeric_tokens,
    normalize_numeric_token,
    token_set,
)


def test_latex_style_range_with_unit():
    tokens = extract_numeric_tokens("FPG 100--125 mg/dL")
    assert len(tokens) == 1
    assert tokens[0].kind is TokenKind.RANGE
    assert tokens[0].normalized == "100-125 mg/dL"
    assert tokens[0].raw == "100--125 mg/dL"


def test_empty_string():
    assert extract_numeric_tokens("") == []


def test_fixture_sentence_skips_hyphenated_words():
    # Hand-enumerated expectation: "2-hour" is a word, not a range.
    tokens = extract_numeric_tokens("A1C 5.7–6.4% or 2-hour glucose 140–199 mg/dL")
    assert [t.normalized for t in tokens] == ["5.7-6.4%", "140-199 mg/dL"]


def test_word_range_and_spacing():
    assert token_set("between 100 to 125 mg/dL today") == {"100-125 mg/dL"}
    assert token_set("100 –  125  mg/dL") == {"100-125 mg/dL"}


def test_kinds():
    kinds = {t.normalized: t.kind for t in extract_numeric_tokens("take 7% of 150 over 24–28 weeks")}
    assert kinds["7%"] is TokenKind.PERCENT
    assert kinds["150"] is TokenKind.VALUE
    assert kinds["24-28"] is TokenKind.RANGE


def test_digits_inside_identifiers_are_not_tokens():
    assert extract_numeric_tokens("A1C testing") == []
    assert extract_numeric_tokens("a 75-g OGTT load") == []
    assert extract_numeric_tokens("ize2h variants") == []


def test_unit_canonicalization():
    assert normalize_numeric_token("30 KG/M2") == "30 kg/m²"
    assert normalize_numeric_token("100 MG/DL") == "100 mg/dL"
    assert normalize_numeric_token("5 MMOL/L") == "5 mmol/l"
    assert token_set("weight 90 KG and BMI 30.4 kg/m2") == {"90 kg", "30.4 kg/m²"}


def test_percent_attaches_without_space():
    assert normalize_numeric_token("5.7 %") == "5.7%"
    assert token_set("goal of 7 % loss") == {"7%"}


FIXTURE_PHRASES = [
    "FPG 100--125 mg/dL",
    "A1C 5.7–6.4%",
    "2-h PG 140–199 mg/dL",
    "24–28 weeks",
    "92 mg/dL",
    "weight loss of 7%",
    "at least 150 minutes",
]


def test_normalization_idempotent_on_fixture_corpus():
    for phrase in FIXTURE_PHRASES:
        for token in extract_numeric_tokens(phrase):
            assert normalize_numeric_token(token.normalized) == token.normalized


@given(st.text(max_size=80))
def test_normalization_idempotent_on_random_strings(s):
    once = normalize_numeric_token(s)
    assert normalize_numeric_token(once) == once


@given(st.text(max_size=200))
def test_extraction_never_raises_and_normalized_is_stable(s):
    for token in extract_numeric_tokens(s):
        assert normalize_numeric_token(token.normalized) == token.normalized
        assert token.raw in s
