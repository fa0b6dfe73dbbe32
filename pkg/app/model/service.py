"""
Model service layer.

This module provides the pure operations over categorization models:
weight combination, constraint evaluation, point validation and data set
ingestion under a violation policy.
"""

import logging
import operator
from collections.abc import Iterable
from functools import reduce

from app.core.enums import CombineOperator, LiteralOperator, ViolationKind, ViolationPolicy
from app.core.exceptions import (
    ConstraintViolationException,
    EmptyWeightCombinationException,
    PointOutOfRangeException,
)
from app.model.schemas import (
    CategorizationModel,
    CategorizationPoint,
    Clause,
    ConstraintSet,
    DataSet,
    IngestionResult,
    PointValidation,
    PointViolation,
)

logger = logging.getLogger(__name__)

_FOLDS = {
    CombineOperator.SUM: operator.add,
    CombineOperator.PRODUCT: operator.mul,
    CombineOperator.MAX: max,
}


def combine_weights(weight_values: Iterable[int], op: CombineOperator) -> int:
    """
    Fold per-category weights under the combine operator.

    Raises:
        EmptyWeightCombinationException: If no weights are given
    """
    weights = list(weight_values)
    if not weights:
        raise EmptyWeightCombinationException()
    return reduce(_FOLDS[op], weights)


def point_satisfies(cs: ConstraintSet, p: CategorizationPoint) -> bool:
    """True iff every clause has a literal true under p."""
    return all(clause.is_satisfied(p) for clause in cs.clauses)


def format_clause(model: CategorizationModel, clause: Clause) -> str:
    """Render a clause in model-document syntax, e.g. `lanes != 1 | current_lane != 2`."""
    parts = []
    for literal in clause.literals:
        category = model.categories[literal.category]
        op = '=' if literal.operator == LiteralOperator.EQ else '!='
        parts.append(f'{category.name} {op} {category.values[literal.value]}')
    return ' | '.join(parts)


def validate_point(model: CategorizationModel, p: CategorizationPoint) -> PointValidation:
    """
    Check a point against the model's domains and constraints.

    Never raises; the first failing field or clause is reported.
    """
    if len(p) != model.n:
        return PointValidation(
            violation=PointViolation(
                kind=ViolationKind.ARITY,
                message=f'point has {len(p)} values, model has {model.n} categories',
            )
        )

    for category, value in zip(model.categories, p):
        if not 0 <= value < category.size:
            return PointValidation(
                violation=PointViolation(
                    kind=ViolationKind.OUT_OF_RANGE,
                    message=(
                        f'value index {value} out of range for category '
                        f'"{category.name}" with {category.size} values'
                    ),
                    category=category.name,
                )
            )

    for position, clause in enumerate(model.constraints.clauses):
        if not clause.is_satisfied(p):
            return PointValidation(
                violation=PointViolation(
                    kind=ViolationKind.CONSTRAINT,
                    message=f'violates clause {position + 1}: {format_clause(model, clause)}',
                    clause_index=position,
                )
            )

    return PointValidation()


def ingest_points(
    model: CategorizationModel,
    points: Iterable[CategorizationPoint],
    policy: ViolationPolicy = ViolationPolicy.REJECT,
    lines: Iterable[int] | None = None,
) -> IngestionResult:
    """
    Build a data set, enforcing the constraint set on every point.

    Args:
        model: Categorization model the points belong to
        points: Points in ingestion order
        policy: REJECT raises on the first violation, DROP skips and counts it
        lines: Optional source line per point, used in reports

    Raises:
        PointOutOfRangeException: On a point outside the model's domains
        ConstraintViolationException: On a violating point under REJECT
    """
    rows: list[CategorizationPoint] = []
    dropped_lines: list[int] = []
    line_iter = iter(lines) if lines is not None else None

    for position, point in enumerate(points):
        line = next(line_iter) if line_iter is not None else None
        point = tuple(point)
        validation = validate_point(model, point)
        if validation.ok:
            rows.append(point)
            continue

        where = line if line is not None else position + 1
        if validation.violation.kind != ViolationKind.CONSTRAINT:
            raise PointOutOfRangeException(point, validation.violation.message)
        if policy == ViolationPolicy.REJECT:
            raise ConstraintViolationException(
                f'point {model.labels(point)} {validation.violation.message}', line=line
            )
        logger.warning(f'Dropping row {where}: {validation.violation.message}')
        dropped_lines.append(where)

    if dropped_lines:
        logger.warning(f'Dropped {len(dropped_lines)} rows violating the constraint set')

    return IngestionResult(
        dataset=DataSet(rows=tuple(rows)),
        accepted=len(rows),
        dropped=len(dropped_lines),
        dropped_lines=tuple(dropped_lines),
    )
