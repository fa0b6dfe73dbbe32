"""
Projection coverage command-line application.

Commands:
- validate: check a model document
- coverage: report k-projection (or full) coverage of a data set
- generate: propose new points until coverage is full

Documents go to stdout (or --out); logs and errors go to stderr. Exit codes:
0 success, 1 usage or input error, 2 generation budget exhausted.
"""

import logging
from pathlib import Path
from typing import Annotated

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from app.commands.schemas import RunConfig
from app.commands.service import render_summary, run_coverage, run_generate, run_validate
from app.core.config import settings
from app.core.enums import CombineOperator, GenerationStrategy, ViolationPolicy
from app.core.error_handlers import handle_exception
from app.core.exceptions import CoverageEngineException

app = typer.Typer(
    name='projcov',
    help='Quantitative k-projection coverage and test point generation.',
    add_completion=False,
    no_args_is_help=True,
)

err_console = Console(stderr=True)

# ==================== Shared Options ====================

ModelOption = Annotated[
    Path, typer.Option('--model', '-m', help='Model document (YAML)', show_default=False)
]
DataOption = Annotated[
    Path | None, typer.Option('--data', '-d', help='Data set (CSV with header row)')
]
KOption = Annotated[int, typer.Option('--k', '-k', help='Projection size')]
CombineOption = Annotated[
    CombineOperator | None,
    typer.Option('--combine-op', help='Override the model\'s weight combine operator'),
]
PolicyOption = Annotated[
    ViolationPolicy,
    typer.Option('--on-violation', help='Rows violating the constraints: reject or drop'),
]
EnumLimitOption = Annotated[
    int | None, typer.Option('--enum-limit', help='Ceiling for exact enumeration')
]
OutOption = Annotated[Path | None, typer.Option('--out', '-o', help='Write the document here')]
JsonOption = Annotated[bool, typer.Option('--json', help='Emit the JSON document')]


def _configure_logging(level: int | str) -> None:
    logging.basicConfig(
        level=level,
        format='%(message)s',
        datefmt='[%X]',
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _fail(exc: Exception) -> typer.Exit:
    response = handle_exception(exc)
    # str(exc) keeps the line/column prefix of parse errors
    reason = str(exc) or response.message
    err_console.print(f'[bold red]error[/bold red] ({response.error_code}): {escape(reason)}')
    return typer.Exit(code=response.exit_code)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        typer.echo(text, nl=False)
        return
    out.write_text(text, encoding='utf-8', newline='\n')


def _print_version(value: bool) -> None:
    if value:
        typer.echo(f'{settings.APP_NAME} {settings.APP_VERSION}')
        raise typer.Exit()


@app.callback()
def main(
    verbose: Annotated[
        bool, typer.Option('--verbose', '-v', help='Log solver and table details')
    ] = False,
    version: Annotated[
        bool,
        typer.Option(
            '--version',
            callback=_print_version,
            is_eager=True,
            help='Print the version and exit',
        ),
    ] = False,
) -> None:
    """Quantitative k-projection coverage and test point generation."""
    _configure_logging(logging.DEBUG if verbose else settings.LOG_LEVEL)


# ==================== Commands ====================


@app.command()
def validate(
    model: ModelOption,
    combine_op: CombineOption = None,
    json_output: JsonOption = False,
) -> None:
    """Parse a model and print its shape and whether its constraints are satisfiable."""
    try:
        summary = run_validate(RunConfig(model_path=model, combine_op=combine_op))
    except (CoverageEngineException, ValidationError, OSError) as exc:
        raise _fail(exc) from exc

    if json_output:
        typer.echo(summary.model_dump_json(indent=2))
    else:
        typer.echo(render_summary(summary), nl=False)


@app.command()
def coverage(
    model: ModelOption,
    data: DataOption = None,
    k: KOption = settings.DEFAULT_K,
    full: Annotated[
        bool, typer.Option('--full', help='Coverage over full points instead of projections')
    ] = False,
    tables: Annotated[
        bool, typer.Option('--tables', help='Also render every projection table')
    ] = False,
    combine_op: CombineOption = None,
    on_violation: PolicyOption = settings.VIOLATION_POLICY,
    enum_limit: EnumLimitOption = None,
    out: OutOption = None,
    json_output: JsonOption = False,
) -> None:
    """Report coverage of a data set."""
    try:
        config = RunConfig(
            model_path=model,
            data_path=data,
            k=k,
            full=full,
            tables=tables,
            combine_op=combine_op,
            policy=on_violation,
            enumeration_limit=enum_limit,
            out_path=out,
            json_output=json_output,
        )
        outcome = run_coverage(config)
        text = (
            outcome.report.model_dump_json(indent=2) + '\n'
            if json_output
            else outcome.report_text
        )
        _emit(text, out)
    except (CoverageEngineException, ValidationError, OSError) as exc:
        raise _fail(exc) from exc


@app.command()
def generate(
    model: ModelOption,
    data: DataOption = None,
    k: KOption = settings.DEFAULT_K,
    budget: Annotated[
        int, typer.Option('--budget', help='Maximum number of points to generate')
    ] = settings.DEFAULT_BUDGET,
    strategy: Annotated[
        GenerationStrategy,
        typer.Option('--strategy', help='ilp (greedy) or completion (unconstrained only)'),
    ] = GenerationStrategy.ILP,
    combine_op: CombineOption = None,
    on_violation: PolicyOption = settings.VIOLATION_POLICY,
    enum_limit: EnumLimitOption = None,
    out: OutOption = None,
    trace_out: Annotated[
        Path | None, typer.Option('--trace-out', help='Write the generation trace (CSV)')
    ] = None,
    lp_out: Annotated[
        Path | None, typer.Option('--lp-out', help='Write the first step\'s program (LP format)')
    ] = None,
    json_output: JsonOption = False,
) -> None:
    """Generate points until k-projection coverage is full or the budget is spent."""
    try:
        config = RunConfig(
            model_path=model,
            data_path=data,
            k=k,
            budget=budget,
            strategy=strategy,
            combine_op=combine_op,
            policy=on_violation,
            enumeration_limit=enum_limit,
            out_path=out,
            trace_out_path=trace_out,
            lp_out_path=lp_out,
            json_output=json_output,
        )
        outcome = run_generate(config)
        _emit(
            outcome.trace.model_dump_json(indent=2) + '\n' if json_output else outcome.points_text,
            out,
        )
        if trace_out is not None:
            trace_out.write_text(outcome.trace_text, encoding='utf-8', newline='\n')
        if lp_out is not None and outcome.lp_text is not None:
            lp_out.write_text(outcome.lp_text, encoding='utf-8', newline='\n')
    except (CoverageEngineException, ValidationError, OSError) as exc:
        raise _fail(exc) from exc

    trace = outcome.trace
    err_console.print(
        f'{len(trace.steps)} points generated, coverage '
        f'{trace.final_numerator}/{trace.denominator}: {trace.reason.value}'
    )
    raise typer.Exit(code=outcome.exit_code)


if __name__ == '__main__':
    app()
