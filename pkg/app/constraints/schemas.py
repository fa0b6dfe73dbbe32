"""
Constraint engine schemas.

A partial assignment fixes the values of a subset of categories, e.g. the
categories of a projected cell during occupation checking.
"""

from collections.abc import Iterable, Mapping

# category index -> value index
PartialAssignment = Mapping[int, int]


def partial_from_cell(categories: Iterable[int], cell: Iterable[int]) -> dict[int, int]:
    """Partial assignment fixing the projected categories to the cell's values."""
    return dict(zip(categories, cell))
