"""Execution of the five atomic table operations.

Every function here is pure: the input table is never modified and the
result is a fresh table. Column arguments resolve case-insensitively after
whitespace trimming. Row indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .errors import (
    DuplicateColumnError,
    DuplicateIndexError,
    EndNotExecutableError,
    IndexOutOfRangeError,
    LengthMismatchError,
    UnknownColumnError,
)
from .expressions import (
    Expression,
    Predicate,
    eval_expression,
    eval_predicate,
    expression_columns,
    predicate_columns,
)
from .opcalls import (
    AddColumn,
    End,
    GroupBy,
    OperationCall,
    SelectColumn,
    SelectRow,
    SortBy,
)
from .table import Empty, Number, Table, Value


def _resolve(table: Table, name: str) -> int:
    index = table.column_index(name)
    if index is None:
        raise UnknownColumnError(name, table.column_names)
    return index


def _row_context(table: Table, row: tuple[Value, ...], names: set[str]) -> dict[str, Value]:
    return {name: row[_resolve(table, name)] for name in names}


def exec_add_column(
    table: Table, name: str, body: Expression | tuple[Value, ...]
) -> Table:
    """Append a rightmost column, computed per row or given explicitly."""
    if table.column_index(name) is not None:
        raise DuplicateColumnError(name)
    if isinstance(body, tuple):
        if len(body) != table.n_rows:
            raise LengthMismatchError(table.n_rows, len(body))
        new_cells = body
    else:
        referenced = expression_columns(body)
        for column in referenced:
            _resolve(table, column)
        new_cells = tuple(
            eval_expression(body, _row_context(table, row, referenced), i)
            for i, row in enumerate(table.rows, start=1)
        )
    rows = tuple(row + (cell,) for row, cell in zip(table.rows, new_cells))
    return Table(table.column_names + (name,), rows, provenance=table.provenance)


def exec_select_column(table: Table, names: tuple[str, ...]) -> Table:
    """Keep exactly the named columns, in the requested order."""
    indices = [_resolve(table, name) for name in names]
    kept_names = tuple(table.column_names[i] for i in indices)
    rows = tuple(tuple(row[i] for i in indices) for row in table.rows)
    return Table(kept_names, rows, provenance=table.provenance)


def exec_select_row(
    table: Table, selector: tuple[int, ...] | Predicate
) -> Table:
    """Filter rows by 1-based indices or by predicate; original order kept."""
    if isinstance(selector, tuple):
        seen: set[int] = set()
        for index in selector:
            if index in seen:
                raise DuplicateIndexError(index)
            seen.add(index)
            if not 1 <= index <= table.n_rows:
                raise IndexOutOfRangeError(index, table.n_rows)
        rows = tuple(table.rows[i - 1] for i in sorted(seen))
    else:
        referenced = predicate_columns(selector)
        for column in referenced:
            _resolve(table, column)
        rows = tuple(
            row
            for i, row in enumerate(table.rows, start=1)
            if eval_predicate(selector, _row_context(table, row, referenced), i)
        )
    return Table(table.column_names, rows, provenance=table.provenance)


def _group_key(value: Value):
    if isinstance(value, Empty):
        return ("empty",)
    if isinstance(value, Number):
        return ("number", value.magnitude)
    return ("text", value.text.casefold())


def exec_group_by(table: Table, column: str) -> Table:
    """Collapse to (value, count) pairs, ordered by first appearance.

    Numbers group by magnitude, text case-insensitively (first-seen casing
    is displayed), Empty forms its own group.
    """
    index = _resolve(table, column)
    order: list[tuple] = []
    first_seen: dict[tuple, Value] = {}
    counts: dict[tuple, int] = {}
    for row in table.rows:
        key = _group_key(row[index])
        if key not in counts:
            order.append(key)
            first_seen[key] = row[index]
            counts[key] = 0
        counts[key] += 1
    original_name = table.column_names[index]
    count_name = "Count"
    while original_name.strip().casefold() == count_name.casefold():
        count_name += "_"
    rows = tuple(
        (first_seen[key], Number(str(counts[key]), Decimal(counts[key])))
        for key in order
    )
    return Table((original_name, count_name), rows, provenance=table.provenance)


def _sort_key(value: Value):
    # Empty < Number (by magnitude) < Text (case-insensitive); the rank
    # component keeps cross-type comparisons away from Decimal/str.
    if isinstance(value, Empty):
        return (0, 0)
    if isinstance(value, Number):
        return (1, value.magnitude)
    return (2, value.text.casefold())


def exec_sort_by(table: Table, column: str, order: str) -> Table:
    """Stable sort on one column; ``desc`` reverses the key order only."""
    index = _resolve(table, column)
    rows = tuple(
        sorted(
            table.rows,
            key=lambda row: _sort_key(row[index]),
            reverse=(order == "desc"),
        )
    )
    return Table(table.column_names, rows, provenance=table.provenance)


def apply(table: Table, call: OperationCall) -> Table:
    """Dispatch one operation call against a table state."""
    if isinstance(call, End):
        raise EndNotExecutableError()
    if isinstance(call, AddColumn):
        return exec_add_column(table, call.name, call.body)
    if isinstance(call, SelectColumn):
        return exec_select_column(table, call.names)
    if isinstance(call, SelectRow):
        return exec_select_row(table, call.selector)
    if isinstance(call, GroupBy):
        return exec_group_by(table, call.column)
    if isinstance(call, SortBy):
        return exec_sort_by(table, call.column, call.order)
    raise TypeError(f"not an operation call: {call!r}")


@dataclass(frozen=True)
class OperationHistory:
    """Append-only record of executed operations (never contains End)."""

    steps: tuple[OperationCall, ...] = ()

    def append(self, call: OperationCall) -> "OperationHistory":
        if isinstance(call, End):
            raise EndNotExecutableError()
        return OperationHistory(self.steps + (call,))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def replay(t0: Table, history: OperationHistory) -> Table:
    """Left-fold of apply over a history; the state-consistency oracle."""
    table = t0
    for call in history:
        table = apply(table, call)
    return table
