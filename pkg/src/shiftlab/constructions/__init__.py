"""Finite-scale realisations of the constructions, each returning audits."""
