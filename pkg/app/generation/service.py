"""
Generation service layer.

This module produces new categorization points that raise coverage:
- minimum_one_projection: closed-form completion for k=1 without constraints
- projection_completion: cell-by-cell completion for any k without constraints
- encode_next_point / next_best_point: one greedy step as a 0-1 program
- achieve_full_coverage: greedy loop until full coverage or budget
- brute_force_next_point: exhaustive oracle for small models

Every step works on incrementally updated projection tables; the caller's
tables are never modified.
"""

import logging
from collections.abc import Iterable

from app.constraints.service import OccupationChecker, enumerate_satisfying
from app.core.config import settings
from app.core.enums import LiteralOperator, TerminationReason
from app.core.exceptions import (
    InvalidProjectionException,
    SpaceTooLargeException,
    UnconstrainedModelRequiredException,
)
from app.coverage.schemas import Cell, ProjectionIndex
from app.coverage.service import (
    ProjectionTables,
    build_tables,
    cell_weight,
    coverage_from_tables,
    project,
    projection_cells,
)
from app.generation.schemas import GenerationTrace, NextPointEncoding, TraceStep
from app.ilp.schemas import IlpProblem, LinearConstraint
from app.ilp.service import solve
from app.model.schemas import CategorizationModel, CategorizationPoint, DataSet

logger = logging.getLogger(__name__)


def _require_unconstrained(model: CategorizationModel, strategy: str) -> None:
    if not model.constraints.is_empty:
        raise UnconstrainedModelRequiredException(strategy)


def _gain(
    tables: ProjectionTables,
    model: CategorizationModel,
    point: CategorizationPoint,
    checker: OccupationChecker,
) -> int:
    """Number of improvable feasible cells the point would newly fill."""
    gain = 0
    for delta in tables.projections:
        cell = project(point, delta)
        if tables.count(delta, cell) < cell_weight(model, delta, cell) and checker.is_feasible(
            delta, cell
        ):
            gain += 1
    return gain


# ==================== Unconstrained Completion ====================


def minimum_one_projection(
    tables: ProjectionTables, model: CategorizationModel
) -> list[CategorizationPoint]:
    """
    Fewest points that complete 1-projection coverage.

    Each round scans categories and values in ascending order, picks the
    first value still under its weight in every category, and fills
    categories with nothing left to pick with value 0. The result has
    exactly max_i Σ_j max(0, W_i(j) - count_i(j)) points.

    Raises:
        UnconstrainedModelRequiredException: If the model has constraints
        InvalidProjectionException: If the tables are not 1-projection tables
    """
    _require_unconstrained(model, 'minimum 1-projection completion')
    if tables.k != 1:
        raise InvalidProjectionException(
            tables.k, model.n, 'minimum 1-projection completion needs k=1 tables'
        )

    counts = [
        [tables.count((i,), (j,)) for j in range(category.size)]
        for i, category in enumerate(model.categories)
    ]
    points: list[CategorizationPoint] = []
    while True:
        picked: list[int | None] = [None] * model.n
        for i, category in enumerate(model.categories):
            for j in range(category.size):
                if counts[i][j] < category.weights[j]:
                    picked[i] = j
                    counts[i][j] += 1
                    break
        if all(value is None for value in picked):
            break
        points.append(tuple(0 if value is None else value for value in picked))

    logger.debug(f'Minimum 1-projection completion needs {len(points)} points')
    return points


def projection_completion(
    tables: ProjectionTables, model: CategorizationModel
) -> list[CategorizationPoint]:
    """
    Complete every projection cell by cell.

    For each projection and cell in lexicographic order, emits the cell
    extended with value 0 until the cell reaches its weight. Never emits more
    than the sum of all cell weights.

    Raises:
        UnconstrainedModelRequiredException: If the model has constraints
    """
    _require_unconstrained(model, 'projection completion')
    working = tables.copy()
    points: list[CategorizationPoint] = []
    for delta in working.projections:
        for cell in projection_cells(model, delta):
            deficit = cell_weight(model, delta, cell) - working.count(delta, cell)
            for _ in range(deficit):
                point = [0] * model.n
                for i, v in zip(delta, cell):
                    point[i] = v
                working.add_point(tuple(point))
                points.append(tuple(point))

    logger.debug(f'Projection completion (k={tables.k}) emitted {len(points)} points')
    return points


# ==================== Greedy Step ====================


def _literal_name(model: CategorizationModel, category: int, value: int) -> str:
    category_ = model.categories[category]
    return f'{category_.name}={category_.values[value]}'


def encode_next_point(
    tables: ProjectionTables,
    model: CategorizationModel,
    checker: OccupationChecker | None = None,
) -> NextPointEncoding | None:
    """
    Encode the search for the point covering most improvable cells.

    Variables come first per category and value, then one occupation
    variable per feasible cell whose count is below its weight, projections
    and cells in lexicographic order. Each clause of the constraint set is
    added as `Σ eq vars - Σ neq vars >= 1 - #neq`.

    Returns:
        None if no improvable feasible cell exists
    """
    checker = checker or OccupationChecker(model)
    k = tables.k
    names: list[str] = []
    constraints: list[LinearConstraint] = []

    value_variables: list[tuple[int, ...]] = []
    for i, category in enumerate(model.categories):
        indices = []
        for j in range(category.size):
            indices.append(len(names))
            names.append(f'var[{_literal_name(model, i, j)}]')
        value_variables.append(tuple(indices))
        constraints.append(
            LinearConstraint(
                terms=tuple((v, 1) for v in indices),
                lower=1,
                upper=1,
                name=f'one[{category.name}]',
            )
        )

    occupation_variables: dict[tuple[ProjectionIndex, Cell], int] = {}
    for delta in tables.projections:
        for cell in projection_cells(model, delta):
            if tables.count(delta, cell) >= cell_weight(model, delta, cell):
                continue
            if not checker.is_feasible(delta, cell):
                continue
            label = ','.join(_literal_name(model, i, v) for i, v in zip(delta, cell))
            occ = len(names)
            names.append(f'occ[{label}]')
            occupation_variables[(delta, cell)] = occ
            terms = [(value_variables[i][v], 1) for i, v in zip(delta, cell)]
            terms.append((occ, -k))
            constraints.append(
                LinearConstraint(terms=tuple(terms), lower=0, upper=k - 1, name=f'link[{label}]')
            )

    if not occupation_variables:
        return None

    for index, clause in enumerate(model.constraints.clauses):
        coefficients: dict[int, int] = {}
        negated = 0
        for literal in clause.literals:
            variable = value_variables[literal.category][literal.value]
            if literal.operator == LiteralOperator.EQ:
                coefficients[variable] = coefficients.get(variable, 0) + 1
            else:
                coefficients[variable] = coefficients.get(variable, 0) - 1
                negated += 1
        constraints.append(
            LinearConstraint(
                terms=tuple((v, c) for v, c in sorted(coefficients.items()) if c),
                lower=1 - negated,
                name=f'clause[{index + 1}]',
            )
        )

    objective = [0] * len(names)
    for occ in occupation_variables.values():
        objective[occ] = 1

    problem = IlpProblem(
        variables=tuple(names), constraints=tuple(constraints), objective=tuple(objective)
    )
    logger.debug(
        f'Encoded next point: {len(names)} variables, {len(occupation_variables)} occupation '
        f'variables, {len(constraints)} constraints'
    )
    return NextPointEncoding(
        problem=problem,
        value_variables=tuple(value_variables),
        occupation_variables=occupation_variables,
    )


def _warn_if_large(encoding: NextPointEncoding) -> None:
    occupied = len(encoding.occupation_variables)
    if occupied > settings.LARGE_PROGRAM_CELLS:
        logger.warning(
            f'Next-point program has {occupied} open cells '
            f'(over {settings.LARGE_PROGRAM_CELLS}); exact solving may take minutes'
        )


def next_best_point(
    tables: ProjectionTables,
    model: CategorizationModel,
    checker: OccupationChecker | None = None,
) -> tuple[CategorizationPoint, int] | None:
    """
    Solve one greedy step to optimality.

    Returns:
        The decoded point and the number of cells it newly covers, or None
        when every feasible cell already meets its weight
    """
    encoding = encode_next_point(tables, model, checker)
    if encoding is None:
        return None
    _warn_if_large(encoding)

    solution = solve(encoding.problem)
    if not solution.is_optimal:
        logger.warning('Next-point program is infeasible although improvable cells remain')
        return None

    point = encoding.decode(solution.assignment)
    logger.debug(f'Next point {model.labels(point)} covers {solution.objective_value} cells')
    return point, solution.objective_value


# ==================== Greedy Loop ====================


def achieve_full_coverage(
    model: CategorizationModel,
    dataset: DataSet,
    k: int,
    budget: int,
    limit: int | None = None,
) -> GenerationTrace:
    """
    Add greedy points until k-projection coverage is full or the budget is spent.

    The limit bounds exact enumeration of constrained projection denominators.

    Raises:
        ValueError: If budget is negative
        InvalidProjectionException: If k is not within 1..n
    """
    if budget < 0:
        raise ValueError(f'budget must be non-negative, got {budget}')

    tables = build_tables(dataset, model, k)
    checker = OccupationChecker(model)
    coverage = coverage_from_tables(model, tables, checker, limit=limit)
    numerator = coverage.numerator
    steps: list[TraceStep] = []

    while True:
        encoding = encode_next_point(tables, model, checker)
        if encoding is None:
            reason = TerminationReason.FULL_COVERAGE
            break
        if not steps:
            _warn_if_large(encoding)
        if len(steps) >= budget:
            reason = TerminationReason.BUDGET_EXHAUSTED
            break

        solution = solve(encoding.problem)
        if not solution.is_optimal:
            logger.warning('Next-point program is infeasible although improvable cells remain')
            reason = TerminationReason.BUDGET_EXHAUSTED
            break

        point = encoding.decode(solution.assignment)
        tables.add_point(point)
        numerator += solution.objective_value
        steps.append(
            TraceStep(
                step=len(steps) + 1,
                point=point,
                objective=solution.objective_value,
                numerator=numerator,
                denominator=coverage.denominator,
            )
        )
        logger.info(
            f'Step {len(steps)}: {model.labels(point)} covers {solution.objective_value} cells, '
            f'coverage {numerator}/{coverage.denominator}'
        )

    logger.info(f'Generation stopped after {len(steps)} points: {reason.value}')
    return GenerationTrace(
        k=k,
        initial_numerator=coverage.numerator,
        denominator=coverage.denominator,
        steps=tuple(steps),
        reason=reason,
    )


def trace_for_points(
    model: CategorizationModel,
    dataset: DataSet,
    k: int,
    points: Iterable[CategorizationPoint],
    reason: TerminationReason,
    limit: int | None = None,
) -> GenerationTrace:
    """Replay precomputed points into a trace; objective is each point's numerator gain."""
    tables = build_tables(dataset, model, k)
    checker = OccupationChecker(model)
    coverage = coverage_from_tables(model, tables, checker, limit=limit)
    numerator = coverage.numerator
    steps: list[TraceStep] = []
    for point in points:
        gain = _gain(tables, model, point, checker)
        tables.add_point(point)
        numerator += gain
        steps.append(
            TraceStep(
                step=len(steps) + 1,
                point=point,
                objective=gain,
                numerator=numerator,
                denominator=coverage.denominator,
            )
        )
    return GenerationTrace(
        k=k,
        initial_numerator=coverage.numerator,
        denominator=coverage.denominator,
        steps=tuple(steps),
        reason=reason,
    )


# ==================== Oracle ====================


def brute_force_next_point(
    model: CategorizationModel, dataset: DataSet, k: int, limit: int | None = None
) -> tuple[CategorizationPoint, int] | None:
    """
    Lexicographically first point covering most improvable cells.

    Scores every satisfying point. Returns None only when the constraint
    set has no solution; a fully covered data set yields objective 0.

    Raises:
        SpaceTooLargeException: If the space exceeds the oracle limit
    """
    limit = settings.ORACLE_LIMIT if limit is None else limit
    if model.space_size > limit:
        raise SpaceTooLargeException(model.space_size, limit, 'brute-force next point')

    tables = build_tables(dataset, model, k)
    checker = OccupationChecker(model)
    best: tuple[CategorizationPoint, int] | None = None
    for point in enumerate_satisfying(model, limit=limit):
        score = _gain(tables, model, point, checker)
        if best is None or score > best[1]:
            best = (point, score)
    return best
