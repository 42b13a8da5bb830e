"""Exact finite-scale tools for shift actions, colourings and local-lemma CSPs."""

__version__ = "0.1.0"
