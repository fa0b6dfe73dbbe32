"""Batch workflows behind the projcov command-line surface."""
