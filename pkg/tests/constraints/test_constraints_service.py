"""
Tests for the constraint engine.

This module tests:
- Satisfiability under partial assignments (occupation checks)
- Lexicographic enumeration of satisfying points
- Weighted model counting and the enumeration limit
"""

import itertools
import random

import pytest

from app.constraints.service import (
    ConstraintSolver,
    OccupationChecker,
    count_weighted_models,
    enumerate_satisfying,
    is_satisfiable,
    satisfiable_under,
)
from app.core.enums import CombineOperator, LiteralOperator
from app.core.exceptions import SpaceTooLargeException
from app.model.schemas import CategorizationModel, Category, Clause, ConstraintSet, Literal
from app.model.service import combine_weights, point_satisfies
from tests.conftest import make_random_model


def _clause(*literals: tuple[int, LiteralOperator, int]) -> Clause:
    return Clause(
        literals=tuple(Literal(category=c, operator=op, value=v) for c, op, v in literals)
    )


@pytest.fixture
def constrained_3x3(three_by_three_w1: CategorizationModel) -> CategorizationModel:
    """Running example with the clause C1 != 0 | C2 = 2."""
    clause = _clause((0, LiteralOperator.NEQ, 0), (1, LiteralOperator.EQ, 2))
    return three_by_three_w1.with_constraints(ConstraintSet(clauses=(clause,)))


@pytest.fixture
def contradictory() -> CategorizationModel:
    """C1 = 0 and C1 != 0 at once."""
    model = CategorizationModel.uniform(2, 2)
    return model.with_constraints(
        ConstraintSet(
            clauses=(
                _clause((0, LiteralOperator.EQ, 0)),
                _clause((0, LiteralOperator.NEQ, 0)),
            )
        )
    )


# ==================== Satisfiability ====================


@pytest.mark.unit
class TestSatisfiableUnder:
    """Test occupation checks for partial assignments."""

    def test_lane_cell_infeasible(self, case_study_model: CategorizationModel):
        """One lane and driving on lane 2 cannot be extended."""
        assert satisfiable_under(case_study_model, {2: 0, 3: 1}) is False

    def test_other_lane_cells_feasible(self, case_study_model: CategorizationModel):
        """The other three lane cells are occupiable."""
        for cell in [(0, 0), (1, 0), (1, 1)]:
            assert satisfiable_under(case_study_model, {2: cell[0], 3: cell[1]}) is True

    def test_unconstrained_always_true(self, three_by_three_w1: CategorizationModel):
        """Without constraints every partial assignment extends."""
        assert satisfiable_under(three_by_three_w1, {0: 2, 2: 1}) is True

    def test_extension_exists(self, constrained_3x3: CategorizationModel):
        """C1=0 extends with C2=2."""
        assert satisfiable_under(constrained_3x3, {0: 0}) is True
        assert satisfiable_under(constrained_3x3, {0: 0, 1: 1}) is False

    def test_contradiction(self, contradictory: CategorizationModel):
        """A contradictory constraint set has no solution at all."""
        assert is_satisfiable(contradictory) is False

    def test_checker_caches(self, case_study_model: CategorizationModel):
        """Repeated checks return the cached answer."""
        checker = OccupationChecker(case_study_model)

        assert checker.is_feasible((2, 3), (0, 1)) is False
        assert checker.is_feasible((2, 3), (0, 1)) is False
        assert checker.is_feasible((0, 1), (2, 1)) is True


# ==================== Enumeration ====================


@pytest.mark.unit
class TestEnumerateSatisfying:
    """Test lexicographic enumeration."""

    def test_unconstrained_binary_pair(self):
        """Two binary categories give four points in order."""
        model = CategorizationModel.uniform(2, 2)
        assert list(enumerate_satisfying(model)) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_constrained_count(self, constrained_3x3: CategorizationModel):
        """21 of the 27 points satisfy the clause."""
        points = list(enumerate_satisfying(constrained_3x3))

        assert len(points) == 21
        assert points == sorted(points)
        assert all(point_satisfies(constrained_3x3.constraints, p) for p in points)

    def test_contradiction_yields_nothing(self, contradictory: CategorizationModel):
        """An unsatisfiable set enumerates no points."""
        assert list(enumerate_satisfying(contradictory)) == []

    def test_limit_refused(self):
        """Spaces above the limit are refused before searching."""
        model = CategorizationModel.uniform(20, 3)
        with pytest.raises(SpaceTooLargeException, match='space too large'):
            enumerate_satisfying(model, limit=1000)

    def test_solver_counts_nodes(self, constrained_3x3: CategorizationModel):
        """The solver records how many search nodes it visited."""
        solver = ConstraintSolver(constrained_3x3)
        assert len(list(solver.solutions())) == 21
        assert solver.nodes > 0


# ==================== Model Counting ====================


@pytest.mark.unit
class TestCountWeightedModels:
    """Test the full-coverage denominator."""

    def test_unconstrained_unit_weights(self, three_by_three_w1: CategorizationModel):
        """All 27 points count once."""
        assert count_weighted_models(three_by_three_w1) == 27

    def test_constrained(self, constrained_3x3: CategorizationModel):
        """Only the 21 satisfying points count."""
        assert count_weighted_models(constrained_3x3) == 21

    def test_weighted_variant(self):
        """Weight 3 on value 2 of C1 and C3 gives 75."""
        model = CategorizationModel(
            categories=(
                Category(name='C1', values=('0', '1', '2'), weights=(1, 1, 3)),
                Category(name='C2', values=('0', '1', '2')),
                Category(name='C3', values=('0', '1', '2'), weights=(1, 1, 3)),
            )
        )
        assert count_weighted_models(model) == 75

    def test_limit(self):
        """The exact denominator is refused for huge spaces."""
        model = CategorizationModel.uniform(20, 3)
        with pytest.raises(SpaceTooLargeException, match='exact full-coverage denominator'):
            count_weighted_models(model, limit=10**7)


# ==================== Properties ====================


@pytest.mark.property
class TestConstraintProperties:
    """Randomized agreement with exhaustive enumeration."""

    def test_satisfiable_under_matches_enumeration(self):
        """Occupation checks agree with brute-force extension search."""
        rng = random.Random(2024)
        for _ in range(200):
            model = make_random_model(rng)
            space = list(itertools.product(*(range(m) for m in model.domain_sizes)))
            satisfying = [p for p in space if point_satisfies(model.constraints, p)]
            size = rng.randint(0, model.n)
            categories = sorted(rng.sample(range(model.n), size))
            partial = {i: rng.randrange(model.domain_sizes[i]) for i in categories}

            expected = any(all(p[i] == v for i, v in partial.items()) for p in satisfying)
            assert satisfiable_under(model, partial) == expected
            assert list(enumerate_satisfying(model)) == satisfying

    def test_unit_product_count_is_cardinality(self):
        """With unit weights and product the count equals the number of solutions."""
        rng = random.Random(99)
        for _ in range(100):
            model = make_random_model(rng)
            unit = CategorizationModel(
                categories=tuple(
                    Category(name=c.name, values=c.values) for c in model.categories
                ),
                combine_op=CombineOperator.PRODUCT,
                constraints=model.constraints,
            )
            assert count_weighted_models(unit) == len(list(enumerate_satisfying(unit)))

    def test_adding_clause_never_increases_count(self):
        """Conjunction can only shrink the weighted count."""
        rng = random.Random(5)
        for _ in range(100):
            model = make_random_model(rng)
            extra = make_random_model(rng)
            if extra.domain_sizes != model.domain_sizes or extra.constraints.is_empty:
                continue
            stronger = model.with_constraints(model.constraints.union(extra.constraints))
            assert count_weighted_models(stronger) <= count_weighted_models(model)

    def test_count_matches_direct_sum(self):
        """The weighted count is the weight sum over satisfying points."""
        rng = random.Random(17)
        for _ in range(100):
            model = make_random_model(rng)
            expected = sum(
                combine_weights(
                    (model.weight(i, v) for i, v in enumerate(p)), model.combine_op
                )
                for p in itertools.product(*(range(m) for m in model.domain_sizes))
                if point_satisfies(model.constraints, p)
            )
            assert count_weighted_models(model) == expected
