"""Categorization model: categories, weights, combine operators and constraints."""
