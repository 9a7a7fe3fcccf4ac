#!/usr/bin/env python3
"""Run the packaged evaluation cases and write eval_report.json here."""

import sys
from pathlib import Path

from guideline_qa.cli import main
from guideline_qa.config import packaged_markup_path

if __name__ == "__main__":
    cases = packaged_markup_path().parent / "eval_cases.json"
    report = Path(__file__).parent / "eval_report.json"
    sys.exit(main(["eval", "--cases", str(cases), "--report", str(report), *sys.argv[1:]]))
