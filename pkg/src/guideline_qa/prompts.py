"""Versioned prompt templates, stored as text assets so changes are reviewable."""

from __future__ import annotations

from pathlib import Path
from string import Template

_PROMPT_DIR = Path(__file__).parent / "prompts"


def prompt_path(template_id: str) -> Path:
    return _PROMPT_DIR / f"{template_id}.txt"


def load_prompt(template_id: str, **values: str) -> str:
    """Render the template asset; unknown placeholders raise KeyError."""
    template = Template(prompt_path(template_id).read_text(encoding="utf-8"))
    return template.substitute(**values)
