"""
Document service layer.

This module reads and writes every text format of the engine:
- parse_model / serialize_model: YAML model documents
- parse_dataset / write_points: comma-separated data sets
- write_report: JSON coverage reports
- write_tables: projection tables with the first covering row per cell
- write_trace: per-step generation trace as CSV

Input may be UTF-8 with or without a byte-order mark and with LF or CRLF
line endings; output always uses LF. Every parse either returns a value or
raises a positioned DocumentParseException.
"""

import csv
import io
import logging
import re
from collections.abc import Iterator
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from app.core.config import settings
from app.core.enums import LiteralOperator, ViolationPolicy
from app.core.exceptions import (
    ColumnCountException,
    DatasetParseException,
    DocumentParseException,
    HeaderMismatchException,
    InvalidModelException,
    ModelParseException,
    UnknownLabelException,
)
from app.coverage.schemas import CoverageResult
from app.coverage.service import ProjectionTables, projection_cells
from app.documents.schemas import (
    CategoryDocument,
    CoverageReport,
    ModelDocument,
    ProjectionReport,
)
from app.generation.schemas import GenerationTrace
from app.model.schemas import (
    CategorizationModel,
    CategorizationPoint,
    Category,
    Clause,
    ConstraintSet,
    IngestionResult,
    Literal,
)
from app.model.service import format_clause, ingest_points

logger = logging.getLogger(__name__)

NodePath = tuple[str | int, ...]
Marks = dict[NodePath, tuple[int, int]]

_LITERAL = re.compile(r'^\s*(?P<name>[^\s=!|]+)\s*(?P<op>!=|=)\s*(?P<value>[^|]*?)\s*$')

INFEASIBLE_MARK = 'X'
WEIGHT_ZERO_MARK = '-'
UNCOVERED_MARK = '.'


def _normalize_text(text: str) -> str:
    return text.removeprefix('\ufeff')


def _text_position(text: str | bytes, offset: int) -> tuple[int, int]:
    """1-based line and column of an offset into a document."""
    newline = b'\n' if isinstance(text, bytes) else '\n'
    line_start = text.rfind(newline, 0, offset) + 1
    return text.count(newline, 0, offset) + 1, offset - line_start + 1


def read_document(path: Path, error: type[DocumentParseException]) -> str:
    """
    Read a UTF-8 document from disk.

    Raises:
        DocumentParseException: Of the given kind, positioned at the first
            byte that is not valid UTF-8
        OSError: If the file cannot be read
    """
    data = path.read_bytes()
    try:
        return data.decode('utf-8')
    except UnicodeDecodeError as exc:
        raise error(
            f'invalid UTF-8 byte 0x{data[exc.start]:02x}', *_text_position(data, exc.start)
        ) from exc


# ==================== Model Documents ====================


def _compose(node: yaml.Node, path: NodePath, marks: Marks) -> Any:
    """Turn a YAML node tree into plain containers of raw scalar strings."""
    marks[path] = (node.start_mark.line + 1, node.start_mark.column + 1)

    if isinstance(node, yaml.ScalarNode):
        # plain empty scalars (`key:`) mean "no value"; quoted ones stay ''
        if node.style is None and node.value == '':
            return None
        return node.value

    if isinstance(node, yaml.SequenceNode):
        return [_compose(item, (*path, index), marks) for index, item in enumerate(node.value)]

    if isinstance(node, yaml.MappingNode):
        data: dict[str, Any] = {}
        for key_node, value_node in node.value:
            line, column = key_node.start_mark.line + 1, key_node.start_mark.column + 1
            if not isinstance(key_node, yaml.ScalarNode):
                raise ModelParseException('mapping keys must be plain text', line, column)
            key = key_node.value
            if key in data:
                raise ModelParseException(f'duplicate key "{key}"', line, column)
            data[key] = _compose(value_node, (*path, key), marks)
        return data

    raise ModelParseException(f'unsupported YAML node {node.tag}', *marks[path])


def _position(marks: Marks, loc: tuple[Any, ...]) -> tuple[int | None, int | None]:
    """Position of the deepest document node named by a validation location."""
    path = tuple(part for part in loc if isinstance(part, (str, int)))
    while path:
        if path in marks:
            return marks[path]
        path = path[:-1]
    return marks.get((), (None, None))


def _validation_failure(
    exc: ValidationError, marks: Marks, prefix: NodePath = ()
) -> ModelParseException:
    error = exc.errors()[0]
    loc = (*prefix, *error['loc'])
    where = '.'.join(str(part) for part in loc)
    message = f'{where}: {error["msg"]}' if where else error['msg']
    return ModelParseException(message, *_position(marks, loc))


def _resolve_weights(document: CategoryDocument) -> tuple[int, ...] | None:
    if document.weights is None:
        return None
    if isinstance(document.weights, list):
        return tuple(document.weights)
    for label in document.weights:
        if label not in document.values:
            raise InvalidModelException(
                f'Category "{document.name}" has no value "{label}"',
                category=document.name,
                value=label,
            )
    return tuple(document.weights.get(label, 1) for label in document.values)


def _parse_clause(text: str, categories: list[Category]) -> Clause:
    """Parse `name != value | name = value` against already built categories."""
    by_name = {category.name: index for index, category in enumerate(categories)}
    literals = []
    for part in text.split('|'):
        match = _LITERAL.match(part)
        if match is None or not match['value']:
            raise ValueError(f'malformed literal "{part.strip()}"')
        name, value = match['name'], match['value']
        if name not in by_name:
            raise InvalidModelException(f'Unknown category "{name}"', category=name)
        index = by_name[name]
        if value not in categories[index].values:
            raise InvalidModelException(
                f'Category "{name}" has no value "{value}"', category=name, value=value
            )
        literals.append(
            Literal(
                category=index,
                operator=LiteralOperator(match['op']),
                value=categories[index].values.index(value),
            )
        )
    return Clause(literals=tuple(literals))


def parse_model(text: str) -> CategorizationModel:
    """
    Parse a YAML model document into a validated model.

    Scalars are read as raw text, so labels such as `1` or `true` stay
    labels. Weights default to 1 and the combine operator to product.

    Raises:
        ModelParseException: On malformed YAML, unknown keys or semantic errors,
            positioned at the offending node
    """
    text = _normalize_text(text)
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        column = mark.column + 1 if mark else None
        raise ModelParseException(str(exc.problem or exc), line, column) from exc
    except yaml.reader.ReaderError as exc:
        raise ModelParseException(
            f'unacceptable character #x{ord(exc.character):04x}',
            *_text_position(text, exc.position),
        ) from exc
    except yaml.YAMLError as exc:
        raise ModelParseException(str(exc)) from exc

    if root is None:
        raise ModelParseException('model document is empty', 1, 1)

    marks: Marks = {}
    raw = _compose(root, (), marks)
    if not isinstance(raw, dict):
        raise ModelParseException('model document must be a mapping', *marks[()])

    try:
        document = ModelDocument.model_validate(raw)
    except ValidationError as exc:
        raise _validation_failure(exc, marks) from exc

    categories: list[Category] = []
    for index, entry in enumerate(document.categories):
        path: NodePath = ('categories', index)
        try:
            categories.append(
                Category(
                    name=entry.name,
                    values=tuple(entry.values),
                    weights=_resolve_weights(entry),
                )
            )
        except ValidationError as exc:
            raise _validation_failure(exc, marks, path) from exc
        except InvalidModelException as exc:
            raise ModelParseException(str(exc), *_position(marks, (*path, 'weights'))) from exc

    clauses: list[Clause] = []
    for index, clause_text in enumerate(document.constraints):
        try:
            clauses.append(_parse_clause(clause_text, categories))
        except (InvalidModelException, ValueError) as exc:
            raise ModelParseException(
                f'clause {index + 1}: {exc}', *_position(marks, ('constraints', index))
            ) from exc

    try:
        model = CategorizationModel(
            categories=tuple(categories),
            combine_op=document.combine,
            constraints=ConstraintSet(clauses=tuple(clauses)),
        )
    except ValidationError as exc:
        raise _validation_failure(exc, marks) from exc

    logger.info(
        f'Parsed model: {model.n} categories, {len(model.constraints)} clauses, '
        f'combine {model.combine_op.value}'
    )
    return model


def serialize_model(model: CategorizationModel) -> str:
    """Render a model as a YAML document that parses back to an equal model."""
    categories = []
    for category in model.categories:
        entry: dict[str, Any] = {'name': category.name, 'values': list(category.values)}
        overrides = {
            label: weight
            for label, weight in zip(category.values, category.weights)
            if weight != 1
        }
        if overrides:
            entry['weights'] = overrides
        categories.append(entry)

    document: dict[str, Any] = {'combine': model.combine_op.value, 'categories': categories}
    if not model.constraints.is_empty:
        document['constraints'] = [
            format_clause(model, clause) for clause in model.constraints.clauses
        ]
    return yaml.safe_dump(
        document, sort_keys=False, default_flow_style=None, allow_unicode=True
    )


# ==================== Data Sets ====================


def _records(reader) -> Iterator[list[str]]:
    """Rows of a CSV reader; malformed CSV becomes a positioned parse error."""
    while True:
        try:
            fields = next(reader)
        except StopIteration:
            return
        except csv.Error as exc:
            raise DatasetParseException(f'malformed CSV: {exc}', reader.line_num) from exc
        yield fields


def parse_dataset(
    text: str, model: CategorizationModel, policy: ViolationPolicy | None = None
) -> IngestionResult:
    """
    Parse a comma-separated data set against a model.

    The header names every category once, in any order; rows are normalized
    to model order. Blank lines are skipped and duplicate rows add
    multiplicity. Rows violating the constraint set follow the policy.

    Raises:
        HeaderMismatchException: If the header does not name exactly the model's categories
        ColumnCountException: If a row has the wrong number of fields
        UnknownLabelException: If a field is not a label of its column's category
        ConstraintViolationException: On a violating row under the reject policy
        DatasetParseException: If the text is not well-formed CSV
    """
    policy = settings.VIOLATION_POLICY if policy is None else policy
    reader = csv.reader(io.StringIO(_normalize_text(text), newline=''))

    header: list[str] | None = None
    points: list[CategorizationPoint] = []
    lines: list[int] = []
    for fields in _records(reader):
        if not fields or all(not field.strip() for field in fields):
            continue
        fields = [field.strip() for field in fields]

        if header is None:
            header = fields
            if sorted(header) != sorted(model.names) or len(set(header)) != len(header):
                raise HeaderMismatchException(model.names, header)
            columns = [model.category_index(name) for name in header]
            continue

        line = reader.line_num
        if len(fields) != model.n:
            raise ColumnCountException(line, model.n, len(fields))
        point = [0] * model.n
        for column, (index, label) in enumerate(zip(columns, fields)):
            category = model.categories[index]
            if label not in category.values:
                raise UnknownLabelException(line, column + 1, category.name, label)
            point[index] = category.values.index(label)
        points.append(tuple(point))
        lines.append(line)

    if header is None:
        raise HeaderMismatchException(model.names, [])

    result = ingest_points(model, points, policy=policy, lines=lines)
    logger.info(f'Parsed data set: {result.accepted} rows accepted, {result.dropped} dropped')
    return result


def _csv_text(rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerows(rows)
    return buffer.getvalue()


def write_points(model: CategorizationModel, points: list[CategorizationPoint]) -> str:
    """Data set document for the points, in the given order."""
    return _csv_text([model.names, *(model.labels(point) for point in points)])


# ==================== Reports ====================


def format_decimal(ratio: Fraction, places: int | None = None) -> str:
    """Round half-even to a fixed number of places without floating point."""
    places = settings.REPORT_DECIMALS if places is None else places
    scaled = round(ratio * 10**places)
    with localcontext() as context:
        # scaleb rounds to the context precision; keep every digit
        context.prec = max(len(str(abs(scaled))), 1)
        return f'{Decimal(scaled).scaleb(-places):f}'


def _report_numbers(numerator: int, denominator: int, ratio: Fraction) -> dict[str, str]:
    return {
        'numerator': str(numerator),
        'denominator': str(denominator),
        'ratio': str(ratio),
        'decimal': format_decimal(ratio),
    }


def build_report(
    result: CoverageResult,
    model: CategorizationModel,
    tables_text: str | None = None,
    ingestion: IngestionResult | None = None,
) -> CoverageReport:
    projections = [
        ProjectionReport(
            categories=[model.categories[i].name for i in p.categories],
            **_report_numbers(p.numerator, p.denominator, p.ratio),
            infeasible_cells=[model.labels(cell, p.categories) for cell in p.infeasible_cells],
            weight_zero_cells=[model.labels(cell, p.categories) for cell in p.weight_zero_cells],
            cells_listed=p.cells_listed,
        )
        for p in result.projections
    ]
    return CoverageReport(
        metric='full' if result.k is None else 'k-projection',
        k=result.k,
        **_report_numbers(result.numerator, result.denominator, result.ratio),
        vacuous=result.vacuous,
        rows_accepted=ingestion.accepted if ingestion else None,
        rows_dropped=ingestion.dropped if ingestion else None,
        projections=projections,
        tables=tables_text,
    )


def write_report(
    result: CoverageResult, model: CategorizationModel, tables_text: str | None = None
) -> str:
    """JSON coverage report; integers are written as decimal strings."""
    return build_report(result, model, tables_text).model_dump_json(indent=2) + '\n'


# ==================== Tables ====================


def _cell_mark(
    tables: ProjectionTables,
    delta: tuple[int, ...],
    cell: tuple[int, ...],
    infeasible: set[tuple[int, ...]],
    weight_zero: set[tuple[int, ...]],
    row_labels: dict[int, str],
) -> str:
    if cell in infeasible:
        return INFEASIBLE_MARK
    if cell in weight_zero:
        return WEIGHT_ZERO_MARK
    row = tables.first_row(delta, cell)
    if row is None:
        return UNCOVERED_MARK
    return row_labels.get(row, str(row))


def _aligned(rows: list[list[str]]) -> list[str]:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return [
        '  '.join(field.ljust(width) for field, width in zip(row, widths)).rstrip()
        for row in rows
    ]


def write_tables(
    model: CategorizationModel,
    tables: ProjectionTables,
    coverage: CoverageResult,
    row_labels: dict[int, str] | None = None,
) -> str:
    """
    Render every projection table.

    A cell shows the label of the first row covering it, `X` when the
    constraints make it infeasible, `-` when its weight is zero and `.` when
    it is still uncovered. Rows are labelled by 1-based position unless
    row_labels names them. Two-category projections are drawn as grids.
    """
    row_labels = row_labels or {}
    blocks = []
    for delta, projection in zip(tables.projections, coverage.projections):
        infeasible = set(projection.infeasible_cells)
        weight_zero = set(projection.weight_zero_cells)
        names = [model.categories[i].name for i in delta]
        title = (
            f'[{" x ".join(names)}] {projection.numerator}/{projection.denominator}'
        )

        if len(delta) == 2:
            first, second = (model.categories[i] for i in delta)
            rows = [[f'{first.name} \\ {second.name}', *second.values]]
            for a, label in enumerate(first.values):
                rows.append(
                    [
                        label,
                        *(
                            _cell_mark(tables, delta, (a, b), infeasible, weight_zero, row_labels)
                            for b in range(second.size)
                        ),
                    ]
                )
        else:
            rows = [[*names, 'row']]
            for cell in projection_cells(model, delta):
                rows.append(
                    [
                        *model.labels(cell, delta),
                        _cell_mark(tables, delta, cell, infeasible, weight_zero, row_labels),
                    ]
                )
        blocks.append('\n'.join([title, *_aligned(rows)]))

    return '\n\n'.join(blocks) + '\n'


# ==================== Traces ====================


def write_trace(model: CategorizationModel, trace: GenerationTrace) -> str:
    """
    Generation trace as CSV, one row per step.

    Step 0 holds the coverage of the input data set with empty point fields.
    """
    header = ['step', *model.names, 'objective', 'numerator', 'denominator', 'ratio', 'decimal']
    initial_ratio = (
        Fraction(trace.initial_numerator, trace.denominator) if trace.denominator else Fraction(1)
    )
    rows = [
        header,
        [
            '0',
            *([''] * model.n),
            '',
            str(trace.initial_numerator),
            str(trace.denominator),
            str(initial_ratio),
            format_decimal(initial_ratio),
        ],
    ]
    for step in trace.steps:
        rows.append(
            [
                str(step.step),
                *model.labels(step.point),
                str(step.objective),
                str(step.numerator),
                str(step.denominator),
                str(step.ratio),
                format_decimal(step.ratio),
            ]
        )
    return _csv_text(rows)
