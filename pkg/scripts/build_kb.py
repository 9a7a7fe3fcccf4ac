#!/usr/bin/env python3
"""Rebuild the packaged fixture KB JSON from its markup source."""

import sys

from guideline_qa.cli import main
from guideline_qa.config import packaged_kb_path, packaged_markup_path

if __name__ == "__main__":
    sys.exit(main([
        "ingest",
        "--markup", str(packaged_markup_path()),
        "--out", str(packaged_kb_path()),
    ]))
