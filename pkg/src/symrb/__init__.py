"""Symmetry-twirled randomized benchmarking for individual quantum gates."""

__version__ = "0.1.0"
