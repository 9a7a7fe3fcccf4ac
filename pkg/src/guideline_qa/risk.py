"""Table-driven diabetes risk score: seven items, cumulative points.

Point values, category cut-offs, interpretations, and recommendation texts
all live in a JSON data file (the shipped default transcribes the published
ADA Diabetes Risk Test), so clinical content is reviewable data, not code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

CM_PER_INCH = 2.54
KG_PER_POUND = 0.45359237

AGE_RANGE = (18, 120)
HEIGHT_CM_RANGE = (90.0, 250.0)
WEIGHT_KG_RANGE = (30.0, 350.0)


class Sex(Enum):
    MALE = "male"
    FEMALE = "female"


class OutOfRange(Exception):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ScoringTableError(Exception):
    pass


@dataclass(frozen=True)
class RiskProfile:
    age_years: int
    sex: Sex
    gestational_history: bool
    family_history: bool
    high_blood_pressure: bool
    physically_active: bool
    height_cm: float
    weight_kg: float


def height_from_imperial(feet: int, inches: float = 0) -> float:
    return (feet * 12 + inches) * CM_PER_INCH


def weight_from_pounds(pounds: float) -> float:
    return pounds * KG_PER_POUND


def validate_profile(profile: RiskProfile) -> None:
    if not AGE_RANGE[0] <= profile.age_years <= AGE_RANGE[1]:
        raise OutOfRange("age_years", f"must be within {AGE_RANGE[0]}-{AGE_RANGE[1]}")
    _check_body(profile.height_cm, profile.weight_kg)


def _check_body(height_cm: float, weight_kg: float) -> None:
    if not HEIGHT_CM_RANGE[0] <= height_cm <= HEIGHT_CM_RANGE[1]:
        raise OutOfRange("height", f"must be within {HEIGHT_CM_RANGE[0]:.0f}-{HEIGHT_CM_RANGE[1]:.0f} cm")
    if not WEIGHT_KG_RANGE[0] <= weight_kg <= WEIGHT_KG_RANGE[1]:
        raise OutOfRange("weight", f"must be within {WEIGHT_KG_RANGE[0]:.0f}-{WEIGHT_KG_RANGE[1]:.0f} kg")


def compute_bmi(height_cm: float, weight_kg: float) -> float:
    """Unrounded BMI in kg/m²; callers round only for display."""
    _check_body(height_cm, weight_kg)
    height_m = height_cm / 100.0
    return weight_kg / (height_m * height_m)


@dataclass(frozen=True)
class PointBracket:
    minimum: float
    points: int


@dataclass(frozen=True)
class Category:
    min_score: int
    label: str
    interpretation: str
    recommendations: tuple[str, ...]


@dataclass(frozen=True)
class ScoringTable:
    age_brackets: tuple[PointBracket, ...]
    sex_points: dict
    item_points: dict
    bmi_brackets: tuple[PointBracket, ...]
    categories: tuple[Category, ...]
    source_note: str = ""


_ITEM_KEYS = ("gestational", "family", "blood_pressure", "inactive")


def load_scoring_table(path: str | Path) -> ScoringTable:
    """Load and sanity-check a scoring table document."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        age = tuple(PointBracket(b["min_age"], b["points"]) for b in doc["age_brackets"])
        bmi = tuple(PointBracket(b["min_bmi"], b["points"]) for b in doc["bmi_brackets"])
        sex_points = {Sex(k): int(v) for k, v in doc["sex_points"].items()}
        item_points = {k: int(doc["item_points"][k]) for k in _ITEM_KEYS}
        categories = tuple(
            Category(
                min_score=c["min_score"],
                label=c["label"],
                interpretation=c["interpretation"],
                recommendations=tuple(c["recommendations"]),
            )
            for c in doc["categories"]
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ScoringTableError(f"malformed scoring table {path}: {exc}") from exc

    table = ScoringTable(
        age_brackets=age,
        sex_points=sex_points,
        item_points=item_points,
        bmi_brackets=bmi,
        categories=categories,
        source_note=str(doc.get("source_note", "")),
    )
    _check_table(table, str(path))
    return table


def _check_table(table: ScoringTable, origin: str) -> None:
    for name, brackets in (("age_brackets", table.age_brackets), ("bmi_brackets", table.bmi_brackets)):
        mins = [b.minimum for b in brackets]
        if not brackets or mins != sorted(set(mins)):
            raise ScoringTableError(f"{origin}: {name} must be strictly increasing")
    mins = [c.min_score for c in table.categories]
    if not table.categories or mins != sorted(set(mins)):
        raise ScoringTableError(f"{origin}: categories must be strictly increasing in min_score")
    labels = [c.label for c in table.categories]
    if len(labels) != len(set(labels)):
        raise ScoringTableError(f"{origin}: category labels must be unique")
    if set(table.sex_points) != set(Sex):
        raise ScoringTableError(f"{origin}: sex_points must cover male and female")


def default_table_path() -> Path:
    return Path(__file__).parent / "data" / "ada_risk_table.json"


def _bracket_points(brackets: tuple[PointBracket, ...], value: float, field: str) -> int:
    chosen: PointBracket | None = None
    for bracket in brackets:
        if value >= bracket.minimum:
            chosen = bracket
    if chosen is None:
        raise OutOfRange(field, f"below the lowest bracket ({brackets[0].minimum})")
    return chosen.points


@dataclass(frozen=True)
class BreakdownItem:
    item_name: str
    input_echo: str
    points: int


@dataclass(frozen=True)
class RiskResult:
    total_score: int
    category_label: str
    interpretation: str
    recommendations: tuple[str, ...]
    breakdown: tuple[BreakdownItem, ...]

    def headline(self) -> str:
        return f"Score: {self.total_score} ({self.category_label})"


def score(profile: RiskProfile, table: ScoringTable) -> RiskResult:
    """Sum the seven per-item lookups and map the total onto a category."""
    validate_profile(profile)
    bmi = compute_bmi(profile.height_cm, profile.weight_kg)

    yes_no = {True: "yes", False: "no"}
    breakdown = (
        BreakdownItem("age", f"{profile.age_years} years",
                      _bracket_points(table.age_brackets, profile.age_years, "age_years")),
        BreakdownItem("sex", profile.sex.value, table.sex_points[profile.sex]),
        BreakdownItem("gestational_history", yes_no[profile.gestational_history],
                      table.item_points["gestational"] if profile.gestational_history else 0),
        BreakdownItem("family_history", yes_no[profile.family_history],
                      table.item_points["family"] if profile.family_history else 0),
        BreakdownItem("high_blood_pressure", yes_no[profile.high_blood_pressure],
                      table.item_points["blood_pressure"] if profile.high_blood_pressure else 0),
        BreakdownItem("physical_activity", "active" if profile.physically_active else "not active",
                      0 if profile.physically_active else table.item_points["inactive"]),
        BreakdownItem("bmi", f"{round(bmi, 1)} kg/m²",
                      _bracket_points(table.bmi_brackets, bmi, "bmi")),
    )

    total = sum(item.points for item in breakdown)
    category = None
    for c in table.categories:
        if total >= c.min_score:
            category = c
    if category is None:
        raise ScoringTableError(f"no category covers total score {total}")

    return RiskResult(
        total_score=total,
        category_label=category.label,
        interpretation=category.interpretation,
        recommendations=category.recommendations,
        breakdown=breakdown,
    )
