"""
Exception handlers for the coverage engine.

This module provides centralized exception handling with consistent error
documents and exit codes for the command-line surface.
"""

import logging
from typing import Callable

from pydantic import ValidationError

from app.core.config import settings
from app.core.enums import ExitCode
from app.core.exceptions import (
    ColumnCountException,
    ConstraintViolationException,
    CoverageEngineException,
    DatasetParseException,
    EmptyWeightCombinationException,
    HeaderMismatchException,
    InvalidModelException,
    InvalidProjectionException,
    MalformedProblemException,
    ModelParseException,
    PointOutOfRangeException,
    SpaceTooLargeException,
    UnconstrainedModelRequiredException,
    UnknownLabelException,
)
from app.core.schemas import ErrorResponse

# Configure logger for this module
logger = logging.getLogger(__name__)

ExceptionHandler = Callable[[Exception], ErrorResponse]


def create_exception_handler(
    exit_code: int, error_code: str, message: str
) -> ExceptionHandler:
    """
    Factory function to create exception handlers with consistent response format.

    Args:
        exit_code: Process exit code to return
        error_code: Machine-readable error code
        message: Human-readable error summary

    Returns:
        Exception handler function
    """

    def exception_handler(exc: Exception) -> ErrorResponse:
        # Extract additional details from exception if available
        detail = {}
        if hasattr(exc, '__dict__'):
            detail = {
                k: v if isinstance(v, (int, str, bool, type(None))) else str(v)
                for k, v in exc.__dict__.items()
                if not k.startswith('_') and k not in ['args', 'with_traceback']
            }
        detail.setdefault('reason', str(exc))

        return ErrorResponse(
            message=message, error_code=error_code, detail=detail, exit_code=exit_code
        )

    return exception_handler


def register_all_errors() -> dict[type[Exception], ExceptionHandler]:
    """
    Build the exception-type to handler table.

    Handlers are resolved by walking the exception's MRO, so a subclass
    without its own entry falls back to its nearest registered ancestor.
    """
    handlers: dict[type[Exception], ExceptionHandler] = {}

    # ==================== Model ====================

    handlers[InvalidModelException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='invalid_model',
        message='Categorization model is invalid',
    )
    handlers[EmptyWeightCombinationException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='empty_weight_combination',
        message='Weight combination over no weights',
    )
    handlers[PointOutOfRangeException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='point_out_of_range',
        message='Categorization point does not fit the model',
    )

    # ==================== Parsing ====================

    handlers[ModelParseException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='model_parse_error',
        message='Model document is malformed',
    )
    handlers[DatasetParseException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='dataset_parse_error',
        message='Data set document is malformed',
    )
    handlers[HeaderMismatchException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='header_mismatch',
        message='Data set header does not match the model',
    )
    handlers[ColumnCountException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='column_count',
        message='Data row has the wrong number of fields',
    )
    handlers[UnknownLabelException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='unknown_label',
        message='Data row uses an unknown value label',
    )
    handlers[ConstraintViolationException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='constraint_violation',
        message='Data point violates the constraint set',
    )

    # ==================== Engine ====================

    handlers[SpaceTooLargeException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='space_too_large',
        message='Categorization space exceeds the enumeration limit',
    )
    handlers[InvalidProjectionException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='invalid_projection',
        message='Projection size is out of range',
    )
    handlers[UnconstrainedModelRequiredException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='unconstrained_model_required',
        message='Strategy requires a model without constraints',
    )
    handlers[MalformedProblemException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='malformed_problem',
        message='0-1 integer program is malformed',
    )

    # ==================== Arguments and Files ====================

    handlers[ValidationError] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='invalid_arguments',
        message='Command arguments are invalid',
    )
    handlers[OSError] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='file_error',
        message='Input or output file could not be accessed',
    )

    # ==================== Generic Engine Exception ====================

    handlers[CoverageEngineException] = create_exception_handler(
        exit_code=ExitCode.ERROR,
        error_code='engine_error',
        message='An unexpected engine error occurred',
    )

    return handlers


_HANDLERS = register_all_errors()


def handle_exception(exc: Exception) -> ErrorResponse:
    """Resolve the handler for an exception and build its error document."""
    for exc_type in type(exc).__mro__:
        handler = _HANDLERS.get(exc_type)
        if handler is not None:
            return handler(exc)

    logger.error(
        f'Unexpected error: {type(exc).__name__}: {exc}',
        exc_info=settings.DEBUG,
    )
    detail = {}
    if settings.DEBUG:
        detail = {'error_type': type(exc).__name__, 'error_message': str(exc)}
    return ErrorResponse(
        message='An unexpected error occurred',
        error_code='internal_error',
        detail=detail,
        exit_code=ExitCode.ERROR,
    )
