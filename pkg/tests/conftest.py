import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the kbgen helper module

from guideline_qa.config import packaged_markup_path
from guideline_qa.kb import parse_guideline_markup
from guideline_qa.pipeline import QaPipeline

#: The worked-example question the fixture KB is built around.
PATIENT_QUESTION = (
    "A 45-year-old man, 5'8'' tall, 200 lbs, with a family history of diabetes "
    "and high blood pressure, is not physically active. His fasting glucose is "
    "130 mg/dL. What should I do next?"
)


@pytest.fixture(scope="session")
def fixture_markup() -> str:
    return packaged_markup_path().read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fixture_kb(fixture_markup):
    return parse_guideline_markup(fixture_markup)


@pytest.fixture()
def pipeline(fixture_kb) -> QaPipeline:
    return QaPipeline(kb=fixture_kb)
