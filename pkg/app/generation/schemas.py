"""
Generation schemas.

This module defines the encoding of a next-point search as a 0-1 program
and the trace of a generation run.
"""

from fractions import Fraction

from pydantic import BaseModel, ConfigDict

from app.core.enums import TerminationReason
from app.coverage.schemas import Cell, ProjectionIndex
from app.ilp.schemas import IlpProblem
from app.model.schemas import CategorizationPoint


class NextPointEncoding(BaseModel):
    """
    A next-point search encoded as a 0-1 program.

    `value_variables[i][j]` is the index of the variable selecting value j
    for category i; `occupation_variables` maps every improvable feasible
    cell to the index of its occupation variable.
    """

    model_config = ConfigDict(frozen=True)

    problem: IlpProblem
    value_variables: tuple[tuple[int, ...], ...]
    occupation_variables: dict[tuple[ProjectionIndex, Cell], int]

    def decode(self, assignment: tuple[int, ...]) -> CategorizationPoint:
        """Read the selected value of every category from an assignment."""
        return tuple(
            next(j for j, variable in enumerate(variables) if assignment[variable] == 1)
            for variables in self.value_variables
        )


class TraceStep(BaseModel):
    """One generated point and the coverage after adding it."""

    model_config = ConfigDict(frozen=True)

    step: int
    point: CategorizationPoint
    objective: int
    numerator: int
    denominator: int

    @property
    def ratio(self) -> Fraction:
        if self.denominator == 0:
            return Fraction(1)
        return Fraction(self.numerator, self.denominator)


class GenerationTrace(BaseModel):
    """Ordered record of generated points with coverage after each."""

    model_config = ConfigDict(frozen=True)

    k: int
    initial_numerator: int
    denominator: int
    steps: tuple[TraceStep, ...] = ()
    reason: TerminationReason

    @property
    def points(self) -> list[CategorizationPoint]:
        return [step.point for step in self.steps]

    @property
    def final_numerator(self) -> int:
        return self.steps[-1].numerator if self.steps else self.initial_numerator

    @property
    def final_ratio(self) -> Fraction:
        if self.denominator == 0:
            return Fraction(1)
        return Fraction(self.final_numerator, self.denominator)
