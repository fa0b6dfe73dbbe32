"""
Document schemas.

This module defines the wire shapes of the text documents:
- CategoryDocument / ModelDocument: the YAML model document, before it is
  resolved into a CategorizationModel
- ProjectionReport / CoverageReport: the JSON coverage report

Report numbers are decimal strings so arbitrarily large integers survive
any JSON consumer.
"""

from pydantic import BaseModel, ConfigDict, Field

from app.core.enums import CombineOperator

# ==================== Model Document ====================


class CategoryDocument(BaseModel):
    """One category entry; weights are a label map (missing labels weigh 1) or a list."""

    model_config = ConfigDict(extra='forbid')

    name: str = Field(..., min_length=1)
    values: list[str] = Field(..., min_length=1)
    weights: dict[str, int] | list[int] | None = None


class ModelDocument(BaseModel):
    """Top-level model document."""

    model_config = ConfigDict(extra='forbid')

    combine: CombineOperator = CombineOperator.PRODUCT
    categories: list[CategoryDocument] = Field(..., min_length=1)
    constraints: list[str] = Field(default_factory=list)


# ==================== Coverage Report ====================


class ProjectionReport(BaseModel):
    """Coverage of one projection, cells named by value labels."""

    categories: list[str]
    numerator: str
    denominator: str
    ratio: str
    decimal: str
    infeasible_cells: list[list[str]] = Field(default_factory=list)
    weight_zero_cells: list[list[str]] = Field(default_factory=list)
    cells_listed: bool = True


class CoverageReport(BaseModel):
    """Coverage report document."""

    metric: str
    k: int | None = None
    numerator: str
    denominator: str
    ratio: str
    decimal: str
    vacuous: bool = False
    # data set row accounting, absent when no data set was read
    rows_accepted: int | None = None
    rows_dropped: int | None = None
    projections: list[ProjectionReport] = Field(default_factory=list)
    # rendered projection tables, only when requested
    tables: str | None = None
