#!/usr/bin/env python3
"""Fidelity-recovery sweep for the single-qubit T layer.

Simulates K = 100 random sequences per length (lengths 8..1000 in steps
of 8, exact survival probabilities), estimates the average gate fidelity
for perturbation strengths {0.001, 0.01, 0.05, 0.1, 0.25}, and writes
fig1a.csv / fig1a.svg comparing the estimates with the exact twirled
fidelity.
"""

import sys

from symrb.cli import main

if __name__ == "__main__":
    sys.exit(main(["reproduce", "--target", "fig1a",
                   "--out", "results/fig1a"] + sys.argv[1:]))
