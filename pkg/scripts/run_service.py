#!/usr/bin/env python3
"""Start the HTTP service on the packaged fixture KB (or --config/--kb)."""

import sys

from guideline_qa.cli import main

if __name__ == "__main__":
    sys.exit(main(["serve", *sys.argv[1:]]))
