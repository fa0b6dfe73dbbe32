"""Satisfiability and weighted model counting over multi-valued CNF constraints."""
