"""
Tests for model operations.

This module tests:
- Weight combination under sum, product and max
- Constraint evaluation and constraint-set union
- Point validation reports
- Data set ingestion under both violation policies
"""

import itertools
import random

import pytest

from app.core.enums import CombineOperator, LiteralOperator, ViolationKind, ViolationPolicy
from app.core.exceptions import (
    ConstraintViolationException,
    EmptyWeightCombinationException,
    PointOutOfRangeException,
)
from app.model.schemas import CategorizationModel, Clause, ConstraintSet, Literal
from app.model.service import (
    combine_weights,
    format_clause,
    ingest_points,
    point_satisfies,
    validate_point,
)
from tests.conftest import make_random_model


def _c1_neq_0_or_c2_eq_2() -> ConstraintSet:
    return ConstraintSet(
        clauses=(
            Clause(
                literals=(
                    Literal(category=0, operator=LiteralOperator.NEQ, value=0),
                    Literal(category=1, operator=LiteralOperator.EQ, value=2),
                )
            ),
        )
    )


# ==================== Weight Combination ====================


@pytest.mark.unit
class TestCombineWeights:
    """Test folding per-category weights."""

    def test_product_of_two_threes(self):
        """Two weights of 3 under product need 9 points."""
        assert combine_weights([3, 3], CombineOperator.PRODUCT) == 9

    def test_product_identity(self):
        """Unit weights multiply to 1."""
        assert combine_weights([1, 1, 1], CombineOperator.PRODUCT) == 1

    def test_max_and_sum(self):
        """Max and sum fold directly."""
        assert combine_weights([2, 3], CombineOperator.MAX) == 3
        assert combine_weights([2, 3], CombineOperator.SUM) == 5

    def test_product_zero_annihilates(self):
        """Any zero factor makes the product 0."""
        assert combine_weights([5, 0, 7], CombineOperator.PRODUCT) == 0

    def test_single_weight(self):
        """A single weight is returned unchanged by every operator."""
        for op in CombineOperator:
            assert combine_weights([4], op) == 4

    def test_empty_list_raises(self):
        """Combining no weights is an error."""
        with pytest.raises(EmptyWeightCombinationException, match='empty weight combination'):
            combine_weights([], CombineOperator.SUM)

    def test_order_insensitive(self):
        """Every operator ignores the order of its weights."""
        weights = [2, 0, 3, 1]
        for op in CombineOperator:
            results = {combine_weights(p, op) for p in itertools.permutations(weights)}
            assert len(results) == 1


# ==================== Constraint Evaluation ====================


@pytest.mark.unit
class TestPointSatisfies:
    """Test CNF evaluation over points."""

    def test_second_literal_satisfies(self):
        """C1=0 but C2=2 satisfies the clause."""
        assert point_satisfies(_c1_neq_0_or_c2_eq_2(), (0, 2, 0)) is True

    def test_empty_set_accepts_everything(self):
        """The unconstrained set accepts any point."""
        assert point_satisfies(ConstraintSet(), (0, 1, 0)) is True

    def test_no_literal_true(self):
        """C1=0 and C2!=2 violates the clause."""
        assert point_satisfies(_c1_neq_0_or_c2_eq_2(), (0, 1, 0)) is False

    def test_union_is_conjunction(self):
        """A point satisfies a union iff it satisfies both parts."""
        rng = random.Random(7)
        for _ in range(50):
            first = make_random_model(rng, max_categories=3)
            second = make_random_model(rng, max_categories=3)
            if first.domain_sizes != second.domain_sizes:
                continue
            union = first.constraints.union(second.constraints)
            for point in itertools.product(*(range(m) for m in first.domain_sizes)):
                assert point_satisfies(union, point) == (
                    point_satisfies(first.constraints, point)
                    and point_satisfies(second.constraints, point)
                )

    def test_repeated_category_literals(self):
        """A clause may mention one category twice."""
        clause = Clause(
            literals=(
                Literal(category=0, operator=LiteralOperator.EQ, value=0),
                Literal(category=0, operator=LiteralOperator.NEQ, value=0),
            )
        )
        cs = ConstraintSet(clauses=(clause,))
        assert point_satisfies(cs, (0,)) is True
        assert point_satisfies(cs, (1,)) is True


# ==================== Point Validation ====================


@pytest.mark.unit
class TestValidatePoint:
    """Test structured point validation."""

    def test_lane_violation_cites_clause(self, case_study_model: CategorizationModel):
        """One lane with the vehicle on lane 2 names the lane clause."""
        point = (0, 0, 0, 1, 0, 0)
        validation = validate_point(case_study_model, point)

        assert validation.ok is False
        assert validation.violation.kind == ViolationKind.CONSTRAINT
        assert validation.violation.clause_index == 0
        assert 'lanes != 1 | current_lane != 2' in validation.violation.message

    def test_unconstrained_point_ok(self, three_by_three_w1: CategorizationModel):
        """Any in-range point passes without constraints."""
        assert validate_point(three_by_three_w1, (2, 1, 0)).ok is True

    def test_out_of_range_value(self, three_by_three_w1: CategorizationModel):
        """A value index equal to the domain size is out of range."""
        validation = validate_point(three_by_three_w1, (0, 3, 0))

        assert validation.violation.kind == ViolationKind.OUT_OF_RANGE
        assert validation.violation.category == 'C2'

    def test_wrong_arity(self, three_by_three_w1: CategorizationModel):
        """A point with too few values is reported, not raised."""
        validation = validate_point(three_by_three_w1, (0, 1))

        assert validation.violation.kind == ViolationKind.ARITY

    def test_ok_implies_satisfied(self):
        """Points that validate always satisfy the constraint set."""
        rng = random.Random(11)
        for _ in range(30):
            model = make_random_model(rng)
            for point in itertools.product(*(range(m) for m in model.domain_sizes)):
                if validate_point(model, point).ok:
                    assert point_satisfies(model.constraints, point)


@pytest.mark.unit
class TestFormatClause:
    """Test clause rendering."""

    def test_renders_labels(self, case_study_model: CategorizationModel):
        """The lane clause renders with category names and labels."""
        clause = case_study_model.constraints.clauses[0]
        assert format_clause(case_study_model, clause) == 'lanes != 1 | current_lane != 2'


# ==================== Ingestion ====================


@pytest.mark.unit
class TestIngestPoints:
    """Test data set construction under violation policies."""

    def test_accepts_valid_points(self, three_by_three_w1: CategorizationModel):
        """Valid points are kept in order with their multiplicity."""
        result = ingest_points(three_by_three_w1, [(0, 0, 0), (1, 1, 1), (0, 0, 0)])

        assert result.accepted == 3
        assert result.dropped == 0
        assert result.dataset.rows == ((0, 0, 0), (1, 1, 1), (0, 0, 0))
        assert result.dataset.multiplicities[(0, 0, 0)] == 2

    def test_reject_raises_with_line(self, three_by_three_w1: CategorizationModel):
        """Under reject the first violating point aborts ingestion."""
        model = three_by_three_w1.with_constraints(_c1_neq_0_or_c2_eq_2())

        with pytest.raises(ConstraintViolationException) as exc_info:
            ingest_points(model, [(1, 0, 0), (0, 1, 0)], lines=[2, 3])

        assert exc_info.value.line == 3
        assert 'C1 != 0 | C2 = 2' in str(exc_info.value)

    def test_drop_counts_rows(self, three_by_three_w1: CategorizationModel):
        """Under drop violating points are skipped and their lines recorded."""
        model = three_by_three_w1.with_constraints(_c1_neq_0_or_c2_eq_2())

        result = ingest_points(
            model, [(1, 0, 0), (0, 1, 0), (0, 2, 0)], policy=ViolationPolicy.DROP, lines=[2, 3, 4]
        )

        assert result.accepted == 2
        assert result.dropped == 1
        assert result.dropped_lines == (3,)
        assert result.dataset.rows == ((1, 0, 0), (0, 2, 0))

    def test_out_of_range_always_raises(self, three_by_three_w1: CategorizationModel):
        """Out-of-range points are errors under either policy."""
        with pytest.raises(PointOutOfRangeException):
            ingest_points(three_by_three_w1, [(0, 0, 5)], policy=ViolationPolicy.DROP)
