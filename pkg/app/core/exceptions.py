"""
Custom exceptions for the coverage engine.

This module defines application-specific exceptions for consistent error
handling across the engine and the command-line surface.
"""


# ==================== Base Exception ====================


class CoverageEngineException(Exception):
    """
    Base exception for all coverage engine exceptions.

    All custom exceptions inherit from this base class to allow
    centralized exception handling.
    """

    pass


# ==================== Model Exceptions ====================


class InvalidModelException(CoverageEngineException):
    """Categorization model is semantically invalid."""

    def __init__(self, message: str, category: str | None = None, value: str | None = None):
        self.category = category
        self.value = value
        super().__init__(message)


class UnknownCategoryException(InvalidModelException):
    """Category name is not part of the model."""

    def __init__(self, category: str):
        super().__init__(f'Unknown category "{category}"', category=category)


class UnknownValueException(InvalidModelException):
    """Value label does not exist in the category's domain."""

    def __init__(self, category: str, value: str):
        super().__init__(
            f'Category "{category}" has no value "{value}"', category=category, value=value
        )


class EmptyWeightCombinationException(CoverageEngineException):
    """Weight combination was requested over no weights."""

    def __init__(self):
        super().__init__('empty weight combination')


class PointOutOfRangeException(CoverageEngineException):
    """Categorization point does not fit the model's domains."""

    def __init__(self, point: tuple[int, ...], message: str):
        self.point = point
        super().__init__(message)


# ==================== Parse Exceptions ====================


class DocumentParseException(CoverageEngineException):
    """Base exception for positioned parse errors."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.reason = message
        self.line = line
        self.column = column
        position = ''
        if line is not None:
            position = f'line {line}'
            if column is not None:
                position += f', column {column}'
            position += ': '
        super().__init__(f'{position}{message}')


class ModelParseException(DocumentParseException):
    """Model document is malformed or semantically invalid."""

    pass


class DatasetParseException(DocumentParseException):
    """Data set document is malformed."""

    pass


class HeaderMismatchException(DatasetParseException):
    """Header row does not name the model's categories."""

    def __init__(self, expected: list[str], found: list[str]):
        self.expected = expected
        self.found = found
        super().__init__(
            f'Header {found} does not match model categories {expected}', line=1
        )


class ColumnCountException(DatasetParseException):
    """Data row has the wrong number of fields."""

    def __init__(self, line: int, expected: int, found: int):
        self.expected = expected
        self.found = found
        super().__init__(f'Expected {expected} fields, found {found}', line=line)


class UnknownLabelException(DatasetParseException):
    """Data row uses a label absent from the column's category."""

    def __init__(self, line: int, column: int, category: str, label: str):
        self.category = category
        self.label = label
        super().__init__(
            f'Category "{category}" has no value "{label}"', line=line, column=column
        )


# ==================== Ingestion Exceptions ====================


class ConstraintViolationException(CoverageEngineException):
    """Data point violates the model's constraint set."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f'line {line}: ' if line is not None else ''
        super().__init__(f'{prefix}{message}')


# ==================== Engine Limit Exceptions ====================


class SpaceTooLargeException(CoverageEngineException):
    """Exact enumeration was requested over a space above the configured limit."""

    def __init__(self, space_size: int, limit: int, what: str = 'exact full-coverage denominator'):
        self.space_size = space_size
        self.limit = limit
        super().__init__(
            f'space too large for {what}: {space_size} points exceed limit {limit}'
        )


class InvalidProjectionException(CoverageEngineException):
    """Projection size is out of range or unsupported by the operation."""

    def __init__(self, k: int, n: int, message: str | None = None):
        self.k = k
        self.n = n
        super().__init__(message or f'Projection size k={k} must satisfy 1 <= k <= {n}')


# ==================== Generation Exceptions ====================


class UnconstrainedModelRequiredException(CoverageEngineException):
    """Strategy only applies to models without constraints."""

    def __init__(self, strategy: str):
        self.strategy = strategy
        super().__init__(f'{strategy} requires unconstrained model')


# ==================== ILP Exceptions ====================


class MalformedProblemException(CoverageEngineException):
    """0-1 integer program is not well-formed."""

    def __init__(self, message: str):
        super().__init__(message)
