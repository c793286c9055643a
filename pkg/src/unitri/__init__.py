"""Exact engine for constructing and certifying unimodular triangulations
of dilated lattice polytopes."""

__version__ = "0.1.0"
