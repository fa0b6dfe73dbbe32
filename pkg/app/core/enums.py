# app/core/enums.py
"""
Core enums for the coverage engine.

These enums provide type-safe options for various fields across the application.
"""

from enum import Enum, IntEnum


class CombineOperator(str, Enum):
    """Operator folding per-category weights into a cell weight."""

    SUM = 'sum'
    PRODUCT = 'product'
    MAX = 'max'


class LiteralOperator(str, Enum):
    """Comparison used by a constraint literal."""

    EQ = '='
    NEQ = '!='


class ViolationPolicy(str, Enum):
    """What ingestion does with data rows violating the constraint set."""

    REJECT = 'reject'
    DROP = 'drop'


class ViolationKind(str, Enum):
    """Why a categorization point failed validation."""

    ARITY = 'arity'
    OUT_OF_RANGE = 'out-of-range'
    CONSTRAINT = 'constraint'


class SolveStatus(str, Enum):
    """Outcome of a 0-1 integer program solve."""

    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'


class TerminationReason(str, Enum):
    """Why the generation loop stopped."""

    FULL_COVERAGE = 'full-coverage'
    BUDGET_EXHAUSTED = 'budget-exhausted'


class GenerationStrategy(str, Enum):
    """How new categorization points are proposed."""

    ILP = 'ilp'
    COMPLETION = 'completion'


class ExitCode(IntEnum):
    """Process exit codes of the command-line surface."""

    SUCCESS = 0
    ERROR = 1
    BUDGET_EXHAUSTED = 2
