"""
Coverage service layer.

This module provides projection, the book-keeping tables and both exact
coverage metrics:
- k_coverage: quantitative k-projection coverage
- full_coverage: categorization coverage over full points
- k_denominator: the k-projection denominator alone

Weight-zero cells and constraint-infeasible cells are excluded from both
numerator and denominator, so every ratio lies in [0, 1]. All arithmetic is
on Python integers; ratios are exact fractions.
"""

import itertools
import logging
import math
from collections import Counter
from collections.abc import Iterable, Iterator
from itertools import combinations

from app.constraints.service import OccupationChecker, count_weighted_models
from app.core.config import settings
from app.core.enums import CombineOperator
from app.core.exceptions import InvalidProjectionException, SpaceTooLargeException
from app.coverage.schemas import Cell, CoverageResult, ProjectionCoverage, ProjectionIndex
from app.model.schemas import CategorizationModel, CategorizationPoint, DataSet
from app.model.service import combine_weights

logger = logging.getLogger(__name__)


# ==================== Projection ====================


def project(p: CategorizationPoint, delta: ProjectionIndex) -> Cell:
    """Select the components of p named by delta, in delta order."""
    return tuple(p[i] for i in delta)


def projection_indices(n: int, k: int) -> list[ProjectionIndex]:
    """All size-k projections of n categories in lexicographic order."""
    if not 1 <= k <= n:
        raise InvalidProjectionException(k, n)
    return list(combinations(range(n), k))


def projection_cells(model: CategorizationModel, delta: ProjectionIndex) -> Iterator[Cell]:
    """Every cell of a projection in lexicographic order."""
    return itertools.product(*(range(model.categories[i].size) for i in delta))


def projection_space(model: CategorizationModel, delta: ProjectionIndex) -> int:
    return math.prod(model.categories[i].size for i in delta)


class ProjectionTables:
    """
    Book-keeping of how often each projected cell has been observed.

    One counter per size-k projection; counters are sparse, so unobserved
    cells read as 0. The first row projecting into each cell is kept for
    reports.
    """

    def __init__(self, model: CategorizationModel, k: int):
        self.model = model
        self.k = k
        self.projections = projection_indices(model.n, k)
        self.size = 0
        self._counts: dict[ProjectionIndex, Counter[Cell]] = {
            delta: Counter() for delta in self.projections
        }
        self._first_rows: dict[ProjectionIndex, dict[Cell, int]] = {
            delta: {} for delta in self.projections
        }

    def add_point(self, point: CategorizationPoint, row: int | None = None) -> None:
        """Record one more point; row defaults to its 1-based position."""
        self.size += 1
        row = self.size if row is None else row
        for delta in self.projections:
            cell = project(point, delta)
            self._counts[delta][cell] += 1
            self._first_rows[delta].setdefault(cell, row)

    def count(self, delta: ProjectionIndex, cell: Cell) -> int:
        return self._counts[delta][cell]

    def first_row(self, delta: ProjectionIndex, cell: Cell) -> int | None:
        return self._first_rows[delta].get(cell)

    def observed(self, delta: ProjectionIndex) -> dict[Cell, int]:
        """Cells with a non-zero count, in lexicographic order."""
        counts = self._counts[delta]
        return {cell: counts[cell] for cell in sorted(counts) if counts[cell]}

    def table(self, delta: ProjectionIndex) -> dict[Cell, int]:
        """Full table of a projection, zero counts included."""
        counts = self._counts[delta]
        return {cell: counts[cell] for cell in projection_cells(self.model, delta)}

    def copy(self) -> 'ProjectionTables':
        clone = ProjectionTables.__new__(ProjectionTables)
        clone.model = self.model
        clone.k = self.k
        clone.projections = list(self.projections)
        clone.size = self.size
        clone._counts = {delta: Counter(c) for delta, c in self._counts.items()}
        clone._first_rows = {delta: dict(r) for delta, r in self._first_rows.items()}
        return clone


def build_tables(dataset: DataSet, model: CategorizationModel, k: int) -> ProjectionTables:
    """Count every data point into every size-k projection."""
    tables = ProjectionTables(model, k)
    for point in dataset.rows:
        tables.add_point(point)
    logger.debug(
        f'Built {len(tables.projections)} projection tables (k={k}) over {len(dataset)} rows'
    )
    return tables


# ==================== Weights ====================


def cell_weight(model: CategorizationModel, delta: ProjectionIndex, cell: Cell) -> int:
    """Combined weight of a projected cell."""
    return combine_weights(
        (model.weight(i, v) for i, v in zip(delta, cell)), model.combine_op
    )


def _unconstrained_denominator(model: CategorizationModel, delta: ProjectionIndex) -> int:
    """Sum of cell weights over a whole projection, without enumerating cells."""
    weights = [model.categories[i].weights for i in delta]
    sizes = [len(w) for w in weights]

    if model.combine_op == CombineOperator.PRODUCT:
        return math.prod(sum(w) for w in weights)

    if model.combine_op == CombineOperator.SUM:
        return sum(
            sum(w) * math.prod(size for j, size in enumerate(sizes) if j != i)
            for i, w in enumerate(weights)
        )

    # max: sum over thresholds t >= 1 of the number of cells whose max reaches t
    total_cells = math.prod(sizes)
    thresholds = sorted({0, *(x for w in weights for x in w)})
    total = 0
    for low, high in itertools.pairwise(thresholds):
        below = math.prod(sum(1 for x in w if x <= low) for w in weights)
        total += (high - low) * (total_cells - below)
    return total


def _weight_zero_possible(model: CategorizationModel, delta: ProjectionIndex) -> bool:
    has_zero = [0 in model.categories[i].weights for i in delta]
    if model.combine_op == CombineOperator.PRODUCT:
        return any(has_zero)
    return all(has_zero)


# ==================== Coverage ====================


def _projection_coverage(
    model: CategorizationModel,
    tables: ProjectionTables,
    delta: ProjectionIndex,
    checker: OccupationChecker,
    limit: int,
) -> ProjectionCoverage:
    numerator = 0
    for cell, count in tables.observed(delta).items():
        weight = cell_weight(model, delta, cell)
        if weight and checker.is_feasible(delta, cell):
            numerator += min(count, weight)

    space = projection_space(model, delta)
    infeasible: list[Cell] = []
    weight_zero: list[Cell] = []

    if model.constraints.is_empty:
        denominator = _unconstrained_denominator(model, delta)
        cells_listed = True
        if _weight_zero_possible(model, delta):
            if space <= limit:
                weight_zero = [
                    cell
                    for cell in projection_cells(model, delta)
                    if cell_weight(model, delta, cell) == 0
                ]
            else:
                cells_listed = False
        return ProjectionCoverage(
            categories=delta,
            numerator=numerator,
            denominator=denominator,
            weight_zero_cells=tuple(weight_zero),
            cells_listed=cells_listed,
        )

    if space > limit:
        raise SpaceTooLargeException(space, limit, 'occupation-checked projection')

    denominator = 0
    for cell in projection_cells(model, delta):
        if not checker.is_feasible(delta, cell):
            infeasible.append(cell)
            continue
        weight = cell_weight(model, delta, cell)
        if weight == 0:
            weight_zero.append(cell)
        denominator += weight

    return ProjectionCoverage(
        categories=delta,
        numerator=numerator,
        denominator=denominator,
        infeasible_cells=tuple(infeasible),
        weight_zero_cells=tuple(weight_zero),
    )


def coverage_from_tables(
    model: CategorizationModel,
    tables: ProjectionTables,
    checker: OccupationChecker | None = None,
    limit: int | None = None,
) -> CoverageResult:
    """k-projection coverage of already built tables."""
    limit = settings.ENUMERATION_LIMIT if limit is None else limit
    checker = checker or OccupationChecker(model)
    projections = tuple(
        _projection_coverage(model, tables, delta, checker, limit)
        for delta in tables.projections
    )
    result = CoverageResult(
        k=tables.k,
        numerator=sum(p.numerator for p in projections),
        denominator=sum(p.denominator for p in projections),
        projections=projections,
    )
    if result.vacuous:
        logger.warning(f'{tables.k}-projection coverage is vacuous: no cell is required')
    return result


def k_coverage(
    model: CategorizationModel, dataset: DataSet, k: int, limit: int | None = None
) -> CoverageResult:
    """
    Quantitative k-projection coverage of a data set.

    Per projection, each feasible cell contributes its observed count capped
    at its combined weight to the numerator and its combined weight to the
    denominator.

    Raises:
        InvalidProjectionException: If k is not within 1..n
        SpaceTooLargeException: If a constrained projection is too large to check cell by cell
    """
    tables = build_tables(dataset, model, k)
    result = coverage_from_tables(model, tables, limit=limit)
    logger.info(
        f'{k}-projection coverage {result.numerator}/{result.denominator} over {len(dataset)} rows'
    )
    return result


def k_denominator(model: CategorizationModel, k: int, limit: int | None = None) -> int:
    """
    The k-projection denominator alone.

    Unconstrained models use a closed form per projection, so no cells are
    enumerated.
    """
    limit = settings.ENUMERATION_LIMIT if limit is None else limit
    deltas = projection_indices(model.n, k)
    if model.constraints.is_empty:
        return sum(_unconstrained_denominator(model, delta) for delta in deltas)

    checker = OccupationChecker(model)
    total = 0
    for delta in deltas:
        space = projection_space(model, delta)
        if space > limit:
            raise SpaceTooLargeException(space, limit, 'occupation-checked projection')
        total += sum(
            cell_weight(model, delta, cell)
            for cell in projection_cells(model, delta)
            if checker.is_feasible(delta, cell)
        )
    return total


def full_coverage(
    model: CategorizationModel, dataset: DataSet, limit: int | None = None
) -> CoverageResult:
    """
    Categorization coverage over full points.

    Raises:
        SpaceTooLargeException: If the space exceeds the enumeration limit
    """
    denominator = count_weighted_models(model, limit=limit)
    numerator = sum(
        min(multiplicity, point_weight(model, point))
        for point, multiplicity in dataset.multiplicities.items()
    )
    logger.info(f'Full coverage {numerator}/{denominator} over {len(dataset)} rows')
    return CoverageResult(k=None, numerator=numerator, denominator=denominator)


def point_weight(model: CategorizationModel, point: Iterable[int]) -> int:
    """Combined weight of a full point."""
    return combine_weights(
        (model.weight(i, v) for i, v in enumerate(point)), model.combine_op
    )
