"""
Command schemas.

This module defines the validated run configuration shared by every command
and the structured outcomes the commands hand back for rendering.
"""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from app.core.config import settings
from app.core.enums import (
    CombineOperator,
    ExitCode,
    GenerationStrategy,
    TerminationReason,
    ViolationPolicy,
)
from app.documents.schemas import CoverageReport
from app.generation.schemas import GenerationTrace


class RunConfig(BaseModel):
    """
    One invocation's inputs, outputs and limits.

    Unset limits and defaults fall back to the environment settings.
    """

    model_config = ConfigDict(frozen=True)

    model_path: Path
    data_path: Path | None = None
    k: int = Field(default_factory=lambda: settings.DEFAULT_K, ge=1)
    combine_op: CombineOperator | None = None
    budget: int = Field(default_factory=lambda: settings.DEFAULT_BUDGET, ge=0)
    policy: ViolationPolicy = Field(default_factory=lambda: settings.VIOLATION_POLICY)
    enumeration_limit: int | None = Field(default=None, ge=1)
    full: bool = False
    tables: bool = False
    strategy: GenerationStrategy = GenerationStrategy.ILP
    out_path: Path | None = None
    trace_out_path: Path | None = None
    lp_out_path: Path | None = None
    json_output: bool = False


class ModelSummary(BaseModel):
    """Diagnostics printed by `validate`."""

    model_config = ConfigDict(frozen=True)

    n: int
    categories: list[str]
    domain_sizes: list[int]
    combine_op: CombineOperator
    clause_count: int
    satisfiable: bool


class CoverageOutcome(BaseModel):
    """Report and optional rendered tables of `coverage`."""

    model_config = ConfigDict(frozen=True)

    report: CoverageReport
    report_text: str
    tables_text: str | None = None


class GenerationOutcome(BaseModel):
    """Generated points, their trace and the process exit code of `generate`."""

    model_config = ConfigDict(frozen=True)

    trace: GenerationTrace
    points_text: str
    trace_text: str
    lp_text: str | None = None

    @property
    def exit_code(self) -> ExitCode:
        if self.trace.reason == TerminationReason.BUDGET_EXHAUSTED:
            return ExitCode.BUDGET_EXHAUSTED
        return ExitCode.SUCCESS
