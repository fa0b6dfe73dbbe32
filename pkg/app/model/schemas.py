"""
Categorization model schemas.

This module defines the immutable domain types of the categorization space:
- Category: one finite value domain with per-value weights
- Literal / Clause / ConstraintSet: CNF constraints over category values
- CategorizationModel: ordered categories, combine operator and constraints
- DataSet: an ordered multiset of categorization points

Points and cells are plain tuples of dense value indices; labels only exist
at the document boundary.
"""

import math
from collections import Counter
from collections.abc import Iterable
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.enums import CombineOperator, LiteralOperator, ViolationKind
from app.core.exceptions import UnknownCategoryException, UnknownValueException

# One value index per category, in model order
CategorizationPoint = tuple[int, ...]

Weight = Annotated[int, Field(ge=0)]

# Separates literals in clause text
LABEL_RESERVED = '|'
# Literal operators; a name must end before them
NAME_RESERVED = frozenset('=!|')


def _check_text(kind: str, text: str) -> None:
    """Names and labels are non-empty printable text without surrounding blanks."""
    if not text:
        raise ValueError(f'{kind} cannot be empty')
    if text != text.strip():
        raise ValueError(f'{kind} "{text}" cannot start or end with whitespace')
    if not text.isprintable():
        raise ValueError(f'{kind} {text!r} contains control characters')


# ==================== Category ====================


class Category(BaseModel):
    """A finite value domain with one non-negative weight per value."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    values: tuple[str, ...] = Field(..., min_length=1)
    weights: tuple[Weight, ...] = ()

    @model_validator(mode='before')
    @classmethod
    def default_weights(cls, data):
        """Missing weights default to 1 for every value."""
        if isinstance(data, dict) and not data.get('weights'):
            data = {**data, 'weights': tuple(1 for _ in data.get('values') or ())}
        return data

    @field_validator('name')
    @classmethod
    def validate_name(cls, v: str) -> str:
        """Names appear on the left of clause literals and in data headers."""
        _check_text('Category name', v)
        forbidden = sorted({ch for ch in v if ch.isspace() or ch in NAME_RESERVED})
        if forbidden:
            raise ValueError(f'Category name "{v}" cannot contain {forbidden}')
        return v

    @field_validator('values')
    @classmethod
    def validate_unique_values(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        """Value labels must be unique within a category and expressible in documents."""
        for label in v:
            _check_text('Value label', label)
            if LABEL_RESERVED in label:
                raise ValueError(f'Value label "{label}" cannot contain "{LABEL_RESERVED}"')
        duplicates = sorted({label for label in v if v.count(label) > 1})
        if duplicates:
            raise ValueError(f'duplicate values {duplicates}')
        return v

    @model_validator(mode='after')
    def validate_weight_count(self) -> 'Category':
        """One weight per value."""
        if len(self.weights) != len(self.values):
            raise ValueError(
                f'Category "{self.name}" has {len(self.values)} values '
                f'but {len(self.weights)} weights'
            )
        return self

    @property
    def size(self) -> int:
        return len(self.values)

    def index_of(self, label: str) -> int:
        """Dense index of a value label."""
        try:
            return self.values.index(label)
        except ValueError:
            raise UnknownValueException(self.name, label) from None


# ==================== Constraints ====================


class Literal(BaseModel):
    """`C_i = v` or `C_i != v` over dense indices."""

    model_config = ConfigDict(frozen=True)

    category: int = Field(..., ge=0)
    operator: LiteralOperator
    value: int = Field(..., ge=0)

    def holds(self, value: int) -> bool:
        """Evaluate the literal for a value of its category."""
        if self.operator == LiteralOperator.EQ:
            return value == self.value
        return value != self.value


class Clause(BaseModel):
    """Non-empty disjunction of literals."""

    model_config = ConfigDict(frozen=True)

    literals: tuple[Literal, ...] = Field(..., min_length=1)

    @property
    def categories(self) -> frozenset[int]:
        return frozenset(literal.category for literal in self.literals)

    def is_satisfied(self, point: CategorizationPoint) -> bool:
        return any(literal.holds(point[literal.category]) for literal in self.literals)


class ConstraintSet(BaseModel):
    """Conjunction of clauses (CNF); empty means unconstrained."""

    model_config = ConfigDict(frozen=True)

    clauses: tuple[Clause, ...] = ()

    def __len__(self) -> int:
        return len(self.clauses)

    @property
    def is_empty(self) -> bool:
        return not self.clauses

    def union(self, other: 'ConstraintSet') -> 'ConstraintSet':
        """Conjunction of both constraint sets."""
        return ConstraintSet(clauses=self.clauses + other.clauses)


# ==================== Model ====================


class CategorizationModel(BaseModel):
    """
    Ordered categories with weights, a combine operator and CNF constraints.

    Products default to scalar multiplication of weights.
    """

    model_config = ConfigDict(frozen=True)

    categories: tuple[Category, ...] = Field(..., min_length=1)
    combine_op: CombineOperator = CombineOperator.PRODUCT
    constraints: ConstraintSet = ConstraintSet()

    @field_validator('categories')
    @classmethod
    def validate_unique_names(cls, v: tuple[Category, ...]) -> tuple[Category, ...]:
        """Category names must be unique."""
        names = [category.name for category in v]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f'duplicate category {duplicates}')
        return v

    @model_validator(mode='after')
    def validate_literals(self) -> 'CategorizationModel':
        """Every literal must reference an existing category and value."""
        for position, clause in enumerate(self.constraints.clauses):
            for literal in clause.literals:
                if literal.category >= len(self.categories):
                    raise ValueError(
                        f'clause {position + 1} references category index {literal.category}'
                    )
                if literal.value >= self.categories[literal.category].size:
                    raise ValueError(
                        f'clause {position + 1} references value index {literal.value} '
                        f'of category "{self.categories[literal.category].name}"'
                    )
        return self

    @classmethod
    def uniform(
        cls,
        n: int,
        value_count: int,
        weight: int = 1,
        combine_op: CombineOperator = CombineOperator.PRODUCT,
    ) -> 'CategorizationModel':
        """n categories C1..Cn sharing the domain "0".."m-1" and a constant weight."""
        return cls(
            categories=tuple(
                Category(
                    name=f'C{i + 1}',
                    values=tuple(str(j) for j in range(value_count)),
                    weights=tuple(weight for _ in range(value_count)),
                )
                for i in range(n)
            ),
            combine_op=combine_op,
        )

    @property
    def n(self) -> int:
        return len(self.categories)

    @property
    def domain_sizes(self) -> tuple[int, ...]:
        return tuple(category.size for category in self.categories)

    @property
    def space_size(self) -> int:
        """Number of full points, ignoring constraints."""
        return math.prod(self.domain_sizes)

    @property
    def names(self) -> list[str]:
        return [category.name for category in self.categories]

    def category_index(self, name: str) -> int:
        for index, category in enumerate(self.categories):
            if category.name == name:
                return index
        raise UnknownCategoryException(name)

    def weight(self, category: int, value: int) -> int:
        return self.categories[category].weights[value]

    def labels(self, point: Iterable[int], categories: Iterable[int] | None = None) -> list[str]:
        """Value labels of a point (or of a cell over the given categories)."""
        indices = range(self.n) if categories is None else categories
        return [self.categories[i].values[v] for i, v in zip(indices, point)]

    def with_combine_op(self, combine_op: CombineOperator) -> 'CategorizationModel':
        return self.model_copy(update={'combine_op': combine_op})

    def with_constraints(self, constraints: ConstraintSet) -> 'CategorizationModel':
        return CategorizationModel(
            categories=self.categories, combine_op=self.combine_op, constraints=constraints
        )


# ==================== Data Set ====================


class DataSet(BaseModel):
    """
    Multiset of categorization points.

    Rows keep ingestion order so reports can name the first row covering a
    cell; multiplicities are derived.
    """

    model_config = ConfigDict(frozen=True)

    rows: tuple[CategorizationPoint, ...] = ()

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def multiplicities(self) -> Counter[CategorizationPoint]:
        return Counter(self.rows)

    def extended(self, points: Iterable[CategorizationPoint]) -> 'DataSet':
        """A new data set with the points appended."""
        return DataSet(rows=self.rows + tuple(tuple(p) for p in points))


# ==================== Validation Results ====================


class PointViolation(BaseModel):
    """Structured reason a point is invalid for a model."""

    model_config = ConfigDict(frozen=True)

    kind: ViolationKind
    message: str
    category: str | None = None
    clause_index: int | None = None


class PointValidation(BaseModel):
    """Result of validating a point: ok, or the first violation found."""

    model_config = ConfigDict(frozen=True)

    violation: PointViolation | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None


class IngestionResult(BaseModel):
    """Data set built under an ingestion policy, with row accounting."""

    model_config = ConfigDict(frozen=True)

    dataset: DataSet
    accepted: int = 0
    dropped: int = 0
    dropped_lines: tuple[int, ...] = ()
