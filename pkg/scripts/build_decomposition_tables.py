#!/usr/bin/env python3
"""Regenerate the irrep decomposition tables for 1..4 copies of T.

Writes data/decompositions/t_copies_{n}.json and prints each table.
n = 4 (group order 6144) takes a few minutes.
"""

import sys
from pathlib import Path

from symrb.cli import main

if __name__ == "__main__":
    out = Path("data/decompositions")
    out.mkdir(parents=True, exist_ok=True)
    for n in (1, 2, 3, 4):
        code = main(["decompose", "--gate", "T", "--copies", str(n),
                     "--json-out", str(out / f"t_copies_{n}.json")])
        if code != 0:
            sys.exit(code)
