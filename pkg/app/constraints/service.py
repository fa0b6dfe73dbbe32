"""
Constraint engine service layer.

This module provides exact satisfiability, enumeration and weighted model
counting over the multi-valued CNF constraints of a categorization model:
- ConstraintSolver: backtracking search with clause forward checking
- OccupationChecker: cached occupation checks for projected cells
- satisfiable_under / enumerate_satisfying / count_weighted_models

Search order is categories ascending, values ascending, so enumeration is
lexicographic and results are reproducible.
"""

import logging
from collections.abc import Iterator

from app.constraints.schemas import PartialAssignment, partial_from_cell
from app.core.config import settings
from app.core.exceptions import PointOutOfRangeException, SpaceTooLargeException
from app.model.schemas import CategorizationModel, CategorizationPoint, Clause
from app.model.service import combine_weights

logger = logging.getLogger(__name__)

Domains = list[frozenset[int]]


class ConstraintSolver:
    """
    Single-use backtracking solver over finite category domains.

    Each category keeps a domain of still-allowed values. After a category
    is assigned, every clause touching it is checked: a clause with no
    remaining support fails the branch, a clause whose remaining support
    lies on a single unassigned category prunes that category's domain.
    """

    def __init__(self, model: CategorizationModel, partial: PartialAssignment | None = None):
        self.model = model
        self.partial = dict(partial or {})
        self.clauses = model.constraints.clauses
        self._clauses_by_category: list[list[Clause]] = [[] for _ in range(model.n)]
        for clause in self.clauses:
            for category in clause.categories:
                self._clauses_by_category[category].append(clause)
        self.nodes = 0

    def _initial_domains(self) -> Domains | None:
        domains: Domains = []
        for index, category in enumerate(self.model.categories):
            if index in self.partial:
                value = self.partial[index]
                if not 0 <= value < category.size:
                    raise PointOutOfRangeException(
                        tuple(self.partial.values()),
                        f'value index {value} out of range for category "{category.name}"',
                    )
                domains.append(frozenset((value,)))
            else:
                domains.append(frozenset(range(category.size)))

        # Clauses over a single category restrict its domain up front
        for clause in self.clauses:
            if len(clause.categories) != 1:
                continue
            (category,) = clause.categories
            allowed = frozenset(
                v for v in domains[category] if any(lit.holds(v) for lit in clause.literals)
            )
            if not allowed:
                return None
            domains[category] = allowed
        return domains

    def _forward_check(
        self, index: int, assignment: list[int | None], domains: Domains
    ) -> Domains | None:
        pruned = domains
        for clause in self._clauses_by_category[index]:
            supports: dict[int, set[int]] = {}
            satisfied = False
            for literal in clause.literals:
                assigned = assignment[literal.category]
                if assigned is not None:
                    if literal.holds(assigned):
                        satisfied = True
                        break
                    continue
                support = {v for v in pruned[literal.category] if literal.holds(v)}
                if support:
                    supports.setdefault(literal.category, set()).update(support)
            if satisfied:
                continue
            if not supports:
                return None
            if len(supports) == 1:
                ((category, support),) = supports.items()
                narrowed = pruned[category] & support
                if narrowed != pruned[category]:
                    if pruned is domains:
                        pruned = list(domains)
                    pruned[category] = frozenset(narrowed)
        return pruned

    def _search(
        self, index: int, assignment: list[int | None], domains: Domains
    ) -> Iterator[CategorizationPoint]:
        self.nodes += 1
        if index == self.model.n:
            yield tuple(assignment)  # type: ignore[arg-type]
            return

        for value in sorted(domains[index]):
            assignment[index] = value
            next_domains = self._forward_check(index, assignment, domains)
            if next_domains is not None:
                yield from self._search(index + 1, assignment, next_domains)
        assignment[index] = None

    def solutions(self) -> Iterator[CategorizationPoint]:
        """All satisfying full points extending the partial assignment, lexicographically."""
        domains = self._initial_domains()
        if domains is None:
            return
        yield from self._search(0, [None] * self.model.n, domains)

    def first_solution(self) -> CategorizationPoint | None:
        return next(self.solutions(), None)


# ==================== Entry Points ====================


def satisfiable_under(model: CategorizationModel, partial: PartialAssignment) -> bool:
    """True iff some full point extends the partial assignment and satisfies CS."""
    if model.constraints.is_empty:
        return True
    return ConstraintSolver(model, partial).first_solution() is not None


def is_satisfiable(model: CategorizationModel) -> bool:
    """True iff the constraint set admits at least one point."""
    return satisfiable_under(model, {})


def _check_limit(model: CategorizationModel, limit: int | None, what: str) -> None:
    limit = settings.ENUMERATION_LIMIT if limit is None else limit
    if model.space_size > limit:
        raise SpaceTooLargeException(model.space_size, limit, what)


def enumerate_satisfying(
    model: CategorizationModel, limit: int | None = None
) -> Iterator[CategorizationPoint]:
    """
    Stream every satisfying full point in lexicographic order.

    Raises:
        SpaceTooLargeException: If the unconstrained space exceeds the limit
    """
    _check_limit(model, limit, 'exact enumeration')
    return ConstraintSolver(model).solutions()


def count_weighted_models(model: CategorizationModel, limit: int | None = None) -> int:
    """
    Sum of combined weights over all satisfying full points.

    Exact counting is #P-hard in general, so it is refused above the
    enumeration limit.

    Raises:
        SpaceTooLargeException: If the unconstrained space exceeds the limit
    """
    _check_limit(model, limit, 'exact full-coverage denominator')
    total = 0
    count = 0
    for point in ConstraintSolver(model).solutions():
        total += combine_weights(
            (model.weight(i, v) for i, v in enumerate(point)), model.combine_op
        )
        count += 1
    logger.debug(f'Counted {count} satisfying points, weighted total {total}')
    return total


# ==================== Occupation Checking ====================


class OccupationChecker:
    """
    Cached occupation checks for projected cells.

    A cell over categories Δ is occupiable iff the constraint set stays
    satisfiable with the Δ categories fixed to the cell's values.
    """

    def __init__(self, model: CategorizationModel):
        self.model = model
        self._cache: dict[tuple[tuple[int, ...], tuple[int, ...]], bool] = {}

    def is_feasible(self, categories: tuple[int, ...], cell: tuple[int, ...]) -> bool:
        if self.model.constraints.is_empty:
            return True
        key = (categories, cell)
        feasible = self._cache.get(key)
        if feasible is None:
            feasible = satisfiable_under(self.model, partial_from_cell(categories, cell))
            self._cache[key] = feasible
        return feasible
