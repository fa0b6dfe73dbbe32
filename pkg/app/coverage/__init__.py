"""Projections, book-keeping tables and exact coverage metrics."""
