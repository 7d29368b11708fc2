"""Exact homological invariants of complex hyperplane arrangements."""

__version__ = "0.1.0"
