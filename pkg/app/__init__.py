"""Projection coverage engine for combinatorial scenario testing."""

__version__ = '1.0.0'
