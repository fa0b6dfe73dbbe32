"""
Root test fixtures and configuration.

This module provides the shared models and data sets used across the suite:
- the three-category running example with constant weights 1 and 2
- the four-category binary example with its three points
- the six-category highway case study with its lane constraint
- seeded random models and points for property suites
"""

import random
from collections.abc import Callable
from pathlib import Path

import pytest

from app.core.enums import CombineOperator, LiteralOperator
from app.documents.service import parse_dataset, parse_model
from app.model.schemas import (
    CategorizationModel,
    Category,
    Clause,
    ConstraintSet,
    DataSet,
    Literal,
)

FILES_DIR = Path(__file__).resolve().parent.parent / 'files'
CASE_STUDY_DIR = FILES_DIR / 'case_study'


# ==================== Running Example ====================


@pytest.fixture
def three_by_three_data() -> DataSet:
    """(2,0,2) three times, (1,1,1) twice and (0,2,0) once."""
    return DataSet(rows=((2, 0, 2),) * 3 + ((1, 1, 1),) * 2 + ((0, 2, 0),))


@pytest.fixture
def three_by_three_w1() -> CategorizationModel:
    return CategorizationModel.uniform(3, 3, weight=1)


@pytest.fixture
def three_by_three_w2() -> CategorizationModel:
    return CategorizationModel.uniform(3, 3, weight=2)


@pytest.fixture
def twenty_by_three() -> CategorizationModel:
    """Twenty categories of three values, all weights 1."""
    return CategorizationModel.uniform(20, 3)


# ==================== Binary Example ====================


@pytest.fixture
def binary_model() -> CategorizationModel:
    """C1..C4 over the labels "0" and "1", all weights 1."""
    return CategorizationModel.uniform(4, 2)


@pytest.fixture
def binary_data() -> DataSet:
    return DataSet(rows=((0, 0, 1, 1), (1, 0, 0, 0), (1, 0, 0, 1)))


# ==================== Case Study ====================


@pytest.fixture
def case_study_model() -> CategorizationModel:
    return parse_model((CASE_STUDY_DIR / 'model.yaml').read_text(encoding='utf-8'))


@pytest.fixture
def case_study_seed(case_study_model: CategorizationModel) -> DataSet:
    text = (CASE_STUDY_DIR / 'seed.csv').read_text(encoding='utf-8')
    return parse_dataset(text, case_study_model).dataset


# ==================== Random Models ====================

# Characters the document formats must carry: CSV and YAML syntax, literal
# operators inside labels, quotes and non-ASCII text
AWKWARD_CHARS = 'abcXYZ019,"\'=!:#-[]{}&*?%@`\\é'
AWKWARD_WORDS = ('true', 'null', '~', '1', '0.5', 'yes', '- a', 'a: b', 'x != y', '"q"')


def _awkward_text(rng: random.Random, reserved: str = '') -> str:
    chars = [ch for ch in AWKWARD_CHARS if ch not in reserved]
    if not reserved and rng.random() < 0.3:
        return rng.choice(AWKWARD_WORDS)
    inner_chars = chars if reserved else [*chars, ' ']
    inner = ''.join(rng.choice(inner_chars) for _ in range(rng.randint(0, 4)))
    if not inner:
        return rng.choice(chars)
    return rng.choice(chars) + inner + rng.choice(chars)


def _distinct(rng: random.Random, count: int, make: Callable[[], str]) -> tuple[str, ...]:
    texts: list[str] = []
    while len(texts) < count:
        text = make()
        if text not in texts:
            texts.append(text)
    return tuple(texts)


def make_random_model(
    rng: random.Random,
    max_categories: int = 5,
    max_values: int = 3,
    max_weight: int = 2,
    max_clauses: int = 3,
    awkward_text: bool = False,
) -> CategorizationModel:
    """
    Random small model with random weights, combine operator and CNF.

    With awkward_text, names and labels are drawn from characters that are
    significant to the CSV and YAML formats instead of C1.. and "0"..
    """
    n = rng.randint(1, max_categories)
    names = (
        _distinct(rng, n, lambda: _awkward_text(rng, reserved=' =!|'))
        if awkward_text
        else tuple(f'C{i + 1}' for i in range(n))
    )
    categories = []
    for name in names:
        size = rng.randint(1, max_values)
        values = (
            _distinct(rng, size, lambda: _awkward_text(rng))
            if awkward_text
            else tuple(str(j) for j in range(size))
        )
        categories.append(
            Category(
                name=name,
                values=values,
                weights=tuple(rng.randint(0, max_weight) for _ in range(size)),
            )
        )

    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        literals = []
        for _ in range(rng.randint(1, 3)):
            category = rng.randrange(n)
            literals.append(
                Literal(
                    category=category,
                    operator=rng.choice(list(LiteralOperator)),
                    value=rng.randrange(categories[category].size),
                )
            )
        clauses.append(Clause(literals=tuple(literals)))

    return CategorizationModel(
        categories=tuple(categories),
        combine_op=rng.choice(list(CombineOperator)),
        constraints=ConstraintSet(clauses=tuple(clauses)),
    )


def make_random_points(
    rng: random.Random, model: CategorizationModel, count: int
) -> list[tuple[int, ...]]:
    """Random points inside the model's domains; constraints are not enforced."""
    return [
        tuple(rng.randrange(category.size) for category in model.categories)
        for _ in range(count)
    ]
