"""
Command service layer.

This module implements the batch workflows behind the command-line surface:
- run_validate: parse a model and report its shape and satisfiability
- run_coverage: k-projection or full coverage of a data set
- run_generate: new points until full coverage or budget

Commands return structured outcomes; rendering and process exit codes are
left to the caller. Every text they produce is deterministic.
"""

import io
import logging

from rich.console import Console
from rich.table import Table

from app.commands.schemas import CoverageOutcome, GenerationOutcome, ModelSummary, RunConfig
from app.constraints.service import OccupationChecker, is_satisfiable
from app.core.enums import GenerationStrategy, TerminationReason
from app.core.exceptions import DatasetParseException, ModelParseException
from app.coverage.service import build_tables, coverage_from_tables, full_coverage
from app.documents.schemas import CoverageReport
from app.documents.service import (
    build_report,
    parse_dataset,
    parse_model,
    read_document,
    write_points,
    write_tables,
    write_trace,
)
from app.generation.service import (
    achieve_full_coverage,
    encode_next_point,
    minimum_one_projection,
    projection_completion,
    trace_for_points,
)
from app.ilp.service import to_lp_format
from app.model.schemas import (
    CategorizationModel,
    CategorizationPoint,
    DataSet,
    IngestionResult,
)

logger = logging.getLogger(__name__)

UNSATISFIABLE_WARNING = 'constraint set unsatisfiable; all coverage vacuous'


# ==================== Loading ====================


def load_model(config: RunConfig) -> CategorizationModel:
    model = parse_model(read_document(config.model_path, ModelParseException))
    if config.combine_op is not None:
        model = model.with_combine_op(config.combine_op)
    return model


def load_dataset(config: RunConfig, model: CategorizationModel) -> IngestionResult | None:
    """Data set named by the config, or None when none is given."""
    if config.data_path is None:
        return None
    result = parse_dataset(
        read_document(config.data_path, DatasetParseException), model, config.policy
    )
    if result.dropped:
        lines = ', '.join(str(line) for line in result.dropped_lines)
        logger.warning(f'Dropped {result.dropped} rows violating the constraints (lines {lines})')
    return result


def _dataset(ingestion: IngestionResult | None) -> DataSet:
    return DataSet() if ingestion is None else ingestion.dataset


def _render(renderable) -> str:
    buffer = io.StringIO()
    Console(file=buffer, width=100, color_system=None, force_terminal=False).print(renderable)
    return buffer.getvalue()


# ==================== Validate ====================


def run_validate(config: RunConfig) -> ModelSummary:
    """Parse and validate a model; an unsatisfiable constraint set is a warning."""
    model = load_model(config)
    satisfiable = is_satisfiable(model)
    if not satisfiable:
        logger.warning(UNSATISFIABLE_WARNING)
    return ModelSummary(
        n=model.n,
        categories=model.names,
        domain_sizes=list(model.domain_sizes),
        combine_op=model.combine_op,
        clause_count=len(model.constraints),
        satisfiable=satisfiable,
    )


def render_summary(summary: ModelSummary) -> str:
    table = Table(title=f'Model: n={summary.n}, {summary.clause_count} clauses')
    table.add_column('category')
    table.add_column('values', justify='right')
    for name, size in zip(summary.categories, summary.domain_sizes):
        table.add_row(name, str(size))
    lines = [
        f'combine: {summary.combine_op.value}',
        f'satisfiable: {"yes" if summary.satisfiable else "no"}',
    ]
    if not summary.satisfiable:
        lines.append(f'warning: {UNSATISFIABLE_WARNING}')
    return _render(table) + '\n'.join(lines) + '\n'


# ==================== Coverage ====================


def render_report(report: CoverageReport) -> str:
    """Human-readable rendering of a coverage report."""
    title = (
        'Full coverage'
        if report.metric == 'full'
        else f'{report.k}-projection coverage'
    )
    summary = (
        f'{title}: {report.numerator}/{report.denominator} = {report.ratio} '
        f'({report.decimal})'
    )
    if report.vacuous:
        summary += ' [vacuous]'
    if report.rows_accepted is not None:
        summary += f'\nrows: {report.rows_accepted} accepted, {report.rows_dropped} dropped'
    if not report.projections:
        return summary + '\n'

    table = Table()
    for column in ('projection', 'covered', 'required', 'ratio', 'infeasible', 'weight zero'):
        table.add_column(column, justify='left' if column == 'projection' else 'right')
    for projection in report.projections:
        table.add_row(
            ' x '.join(projection.categories),
            projection.numerator,
            projection.denominator,
            projection.ratio,
            str(len(projection.infeasible_cells)),
            str(len(projection.weight_zero_cells)) if projection.cells_listed else '?',
        )
    return summary + '\n' + _render(table)


def run_coverage(config: RunConfig) -> CoverageOutcome:
    """
    Coverage of the configured data set.

    Raises:
        InvalidProjectionException: If k exceeds the number of categories
        SpaceTooLargeException: If --full or a constrained projection exceeds the limit
    """
    model = load_model(config)
    ingestion = load_dataset(config, model)
    dataset = _dataset(ingestion)

    tables_text = None
    if config.full:
        result = full_coverage(model, dataset, limit=config.enumeration_limit)
    if not config.full or config.tables:
        tables = build_tables(dataset, model, config.k)
        k_result = coverage_from_tables(
            model, tables, OccupationChecker(model), limit=config.enumeration_limit
        )
        if config.tables:
            tables_text = write_tables(model, tables, k_result)
        if not config.full:
            result = k_result

    report = build_report(result, model, tables_text, ingestion)
    text = render_report(report)
    if tables_text is not None:
        text += '\n' + tables_text
    return CoverageOutcome(report=report, report_text=text, tables_text=tables_text)


# ==================== Generate ====================


def _within_budget(
    points: list[CategorizationPoint], budget: int
) -> tuple[list[CategorizationPoint], TerminationReason]:
    if len(points) > budget:
        return points[:budget], TerminationReason.BUDGET_EXHAUSTED
    return points, TerminationReason.FULL_COVERAGE


def run_generate(config: RunConfig) -> GenerationOutcome:
    """
    Generate points until k-projection coverage is full or the budget is spent.

    The ilp strategy takes the closed-form completion when k=1 and the model
    is unconstrained; the completion strategy always emits cell-by-cell
    completions and needs an unconstrained model.

    Raises:
        InvalidProjectionException: If k exceeds the number of categories
        UnconstrainedModelRequiredException: For the completion strategy with constraints
    """
    model = load_model(config)
    dataset = _dataset(load_dataset(config, model))

    lp_text = None
    if config.lp_out_path is not None:
        encoding = encode_next_point(build_tables(dataset, model, config.k), model)
        if encoding is not None:
            lp_text = to_lp_format(encoding.problem)

    if config.strategy == GenerationStrategy.COMPLETION:
        points = projection_completion(build_tables(dataset, model, config.k), model)
        trace = trace_for_points(
            model,
            dataset,
            config.k,
            *_within_budget(points, config.budget),
            limit=config.enumeration_limit,
        )
    elif config.k == 1 and model.constraints.is_empty:
        logger.info('Unconstrained 1-projection: using minimum completion')
        points = minimum_one_projection(build_tables(dataset, model, 1), model)
        trace = trace_for_points(
            model,
            dataset,
            1,
            *_within_budget(points, config.budget),
            limit=config.enumeration_limit,
        )
    else:
        trace = achieve_full_coverage(
            model, dataset, config.k, config.budget, limit=config.enumeration_limit
        )

    if trace.reason == TerminationReason.BUDGET_EXHAUSTED:
        logger.warning(
            f'Budget of {config.budget} points exhausted at coverage '
            f'{trace.final_numerator}/{trace.denominator}'
        )

    return GenerationOutcome(
        trace=trace,
        points_text=write_points(model, trace.points),
        trace_text=write_trace(model, trace),
        lp_text=lp_text,
    )
