"""
Coverage schemas.

This module defines the exact coverage results:
- ProjectionCoverage: numerator/denominator of a single projection
- CoverageResult: totals, exact ratio and per-projection breakdown
"""

from fractions import Fraction

from pydantic import BaseModel, ConfigDict

# Sorted, strictly ascending category indices
ProjectionIndex = tuple[int, ...]
# Value indices aligned with a ProjectionIndex
Cell = tuple[int, ...]


class ProjectionCoverage(BaseModel):
    """Capped numerator and feasible denominator of one projection."""

    model_config = ConfigDict(frozen=True)

    categories: ProjectionIndex
    numerator: int
    denominator: int
    infeasible_cells: tuple[Cell, ...] = ()
    weight_zero_cells: tuple[Cell, ...] = ()
    # False when the projection was too large to list excluded cells
    cells_listed: bool = True

    @property
    def ratio(self) -> Fraction:
        if self.denominator == 0:
            return Fraction(1)
        return Fraction(self.numerator, self.denominator)


class CoverageResult(BaseModel):
    """
    Exact coverage as numerator over denominator.

    A zero denominator means nothing is required: the result is vacuous and
    its ratio is defined as 1.
    """

    model_config = ConfigDict(frozen=True)

    # None for full categorization coverage
    k: int | None
    numerator: int
    denominator: int
    projections: tuple[ProjectionCoverage, ...] = ()

    @property
    def vacuous(self) -> bool:
        return self.denominator == 0

    @property
    def ratio(self) -> Fraction:
        if self.vacuous:
            return Fraction(1)
        return Fraction(self.numerator, self.denominator)

    @property
    def is_full(self) -> bool:
        return self.numerator == self.denominator

    @property
    def infeasible_cells(self) -> list[tuple[ProjectionIndex, Cell]]:
        return [(p.categories, cell) for p in self.projections for cell in p.infeasible_cells]

    @property
    def weight_zero_cells(self) -> list[tuple[ProjectionIndex, Cell]]:
        return [(p.categories, cell) for p in self.projections for cell in p.weight_zero_cells]
