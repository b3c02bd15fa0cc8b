"""Exact finite-stage verification of a left-completeness counterexample."""

__version__ = "0.1.0"
