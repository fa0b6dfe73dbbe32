"""
0-1 integer programming schemas.

Constraints are two-sided, `lower <= a·x <= upper`, with `None` standing for
an unbounded side. Coefficients are stored sparsely as (variable, coefficient)
pairs; `coefficient_vector` gives the dense form.
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.enums import SolveStatus


class LinearConstraint(BaseModel):
    """`lower <= Σ coefficient·x[variable] <= upper` over binary variables."""

    model_config = ConfigDict(frozen=True)

    terms: tuple[tuple[int, int], ...]
    lower: int | None = None
    upper: int | None = None
    name: str | None = None

    @model_validator(mode='after')
    def validate_bounds(self) -> 'LinearConstraint':
        """Lower bound cannot exceed upper bound."""
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError(f'lower bound {self.lower} exceeds upper bound {self.upper}')
        return self

    def activity(self, assignment: tuple[int, ...] | list[int]) -> int:
        return sum(coefficient * assignment[variable] for variable, coefficient in self.terms)

    def holds(self, assignment: tuple[int, ...] | list[int]) -> bool:
        value = self.activity(assignment)
        if self.lower is not None and value < self.lower:
            return False
        if self.upper is not None and value > self.upper:
            return False
        return True

    def coefficient_vector(self, num_variables: int) -> list[int]:
        vector = [0] * num_variables
        for variable, coefficient in self.terms:
            vector[variable] += coefficient
        return vector


class IlpProblem(BaseModel):
    """Maximize objective·x subject to two-sided linear constraints, x binary."""

    model_config = ConfigDict(frozen=True)

    variables: tuple[str, ...]
    constraints: tuple[LinearConstraint, ...] = ()
    objective: tuple[int, ...] = ()

    @model_validator(mode='after')
    def validate_shape(self) -> 'IlpProblem':
        """Objective and constraint terms must fit the variable list."""
        if len(self.objective) != len(self.variables):
            raise ValueError(
                f'objective has {len(self.objective)} coefficients '
                f'for {len(self.variables)} variables'
            )
        for constraint in self.constraints:
            for variable, _ in constraint.terms:
                if not 0 <= variable < len(self.variables):
                    raise ValueError(f'constraint references unknown variable {variable}')
        return self

    @property
    def num_variables(self) -> int:
        return len(self.variables)


class IlpSolution(BaseModel):
    """Optimal assignment, or the infeasible status."""

    model_config = ConfigDict(frozen=True)

    status: SolveStatus
    assignment: tuple[int, ...] | None = None
    objective_value: int | None = None
    nodes: int = Field(default=0, ge=0)

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL
