"""Operation calls: the wire format between the planner and the engine.

Concrete syntax (whitespace-insensitive between tokens)::

    f_add_column(NAME, EXPR)
    f_add_column(NAME, [v1, v2, ...])
    f_select_column([c1, c2, ...])
    f_select_row([i1, i2, ...])
    f_select_row(PREDICATE)
    f_group_by(COL)
    f_sort_by(COL, asc|desc)
    <END>

``parse_operation_call`` is total over arbitrary text: it extracts the first
syntactically complete call from surrounding prose, or raises a structured
:class:`~tabscope.errors.ParseFailure`. ``format_operation_call`` emits the
canonical single-line form; parsing a formatted call reproduces the same
AST.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import ParseFailure
from .expressions import (
    Expression,
    Predicate,
    format_expression,
    format_name,
    format_predicate,
    parse_expression,
    parse_predicate,
    quote_string,
)
from .table import EMPTY, Empty, Number, Text, Value, classify_cell

OP_ADD_COLUMN = "f_add_column"
OP_SELECT_COLUMN = "f_select_column"
OP_SELECT_ROW = "f_select_row"
OP_GROUP_BY = "f_group_by"
OP_SORT_BY = "f_sort_by"
END_TOKEN = "<END>"

ALL_OPERATIONS = (
    OP_ADD_COLUMN,
    OP_SELECT_COLUMN,
    OP_SELECT_ROW,
    OP_GROUP_BY,
    OP_SORT_BY,
)


@dataclass(frozen=True)
class AddColumn:
    name: str
    body: Union[Expression, tuple[Value, ...]]
    op_name = OP_ADD_COLUMN


@dataclass(frozen=True)
class SelectColumn:
    names: tuple[str, ...]
    op_name = OP_SELECT_COLUMN


@dataclass(frozen=True)
class SelectRow:
    selector: Union[tuple[int, ...], Predicate]
    op_name = OP_SELECT_ROW


@dataclass(frozen=True)
class GroupBy:
    column: str
    op_name = OP_GROUP_BY


@dataclass(frozen=True)
class SortBy:
    column: str
    order: str  # "asc" | "desc"
    op_name = OP_SORT_BY

    def __post_init__(self):
        if self.order not in ("asc", "desc"):
            raise ValueError(f"sort order must be asc or desc, got {self.order!r}")


@dataclass(frozen=True)
class End:
    op_name = END_TOKEN


OperationCall = Union[AddColumn, SelectColumn, SelectRow, GroupBy, SortBy, End]

_END_RE = re.compile(r"<\s*END\s*>", re.IGNORECASE)


def _anchor_regex(allowed: Iterable[str]) -> re.Pattern:
    names = sorted(allowed, key=len, reverse=True)
    alternation = "|".join(re.escape(n) for n in names)
    return re.compile(f"(?:{alternation})|{_END_RE.pattern}", re.IGNORECASE)


def _scan_balanced(text: str, open_pos: int) -> int:
    """Return the index just past the ``)`` matching ``text[open_pos] == '('``."""
    depth = 0
    i = open_pos
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in "\"'":
            quote = ch
            i += 1
            while i < n and text[i] != quote:
                i += 2 if text[i] == "\\" else 1
            if i >= n:
                raise ParseFailure(open_pos, frozenset({"closing quote"}))
        elif ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth == 0:
                if ch != ")":
                    raise ParseFailure(i, frozenset({")"}))
                return i + 1
        i += 1
    raise ParseFailure(n, frozenset({")"}))


def _split_top_level(text: str, offset: int) -> list[tuple[str, int]]:
    """Split on commas outside quotes/brackets; returns (chunk, abs_offset)."""
    parts: list[tuple[str, int]] = []
    depth = 0
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in "\"'":
            quote = ch
            i += 1
            while i < n and text[i] != quote:
                i += 2 if text[i] == "\\" else 1
            if i >= n:
                raise ParseFailure(offset + start, frozenset({"closing quote"}))
        elif ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((text[start:i], offset + start))
            start = i + 1
        i += 1
    parts.append((text[start:], offset + start))
    return parts


def _unquote_name(chunk: str, offset: int) -> str:
    stripped = chunk.strip()
    if not stripped:
        raise ParseFailure(offset, frozenset({"column name"}))
    if stripped[0] in "\"'":
        if len(stripped) < 2 or stripped[-1] != stripped[0]:
            raise ParseFailure(offset, frozenset({"closing quote"}))
        body = stripped[1:-1]
        body = body.replace("\\\\", "\x00").replace('\\"', '"').replace("\\'", "'")
        body = body.replace("\\n", "\n").replace("\\t", "\t").replace("\x00", "\\")
        if not body.strip():
            raise ParseFailure(offset, frozenset({"non-empty column name"}))
        return body
    return stripped


def _parse_value_item(chunk: str, offset: int) -> Value:
    stripped = chunk.strip()
    if stripped and stripped[0] in "\"'":
        return classify_cell(_unquote_text(stripped, offset))
    return classify_cell(stripped)


def _unquote_text(stripped: str, offset: int) -> str:
    if len(stripped) < 2 or stripped[-1] != stripped[0]:
        raise ParseFailure(offset, frozenset({"closing quote"}))
    body = stripped[1:-1]
    body = body.replace("\\\\", "\x00").replace('\\"', '"').replace("\\'", "'")
    return body.replace("\\n", "\n").replace("\\t", "\t").replace("\x00", "\\")


def _bracket_items(chunk: str, offset: int) -> list[tuple[str, int]]:
    stripped = chunk.strip()
    pad = len(chunk) - len(chunk.lstrip())
    if not stripped.startswith("[") or not stripped.endswith("]"):
        raise ParseFailure(offset + pad, frozenset({"["}))
    inner = stripped[1:-1]
    if not inner.strip():
        return []
    return _split_top_level(inner, offset + pad + 1)


_INT_RE = re.compile(r"[+-]?\d+")


def _parse_call_at(text: str, anchor: re.Match, allowed: tuple[str, ...]) -> OperationCall:
    matched = anchor.group(0)
    if matched.lstrip().startswith("<"):
        return End()
    op = matched.casefold()
    if op not in allowed:
        raise ParseFailure(anchor.start(), frozenset(allowed))
    i = anchor.end()
    n = len(text)
    while i < n and text[i].isspace():
        i += 1
    if i >= n or text[i] != "(":
        raise ParseFailure(i, frozenset({"("}))
    close = _scan_balanced(text, i)
    args = _split_top_level(text[i + 1 : close - 1], i + 1)

    def expect_args(count: int):
        if len(args) != count:
            raise ParseFailure(
                i, frozenset({f"{count} argument{'s' if count != 1 else ''}"})
            )

    if op == OP_GROUP_BY:
        expect_args(1)
        return GroupBy(_unquote_name(*args[0]))

    if op == OP_SORT_BY:
        expect_args(2)
        column = _unquote_name(*args[0])
        order = args[1][0].strip().casefold()
        if order not in ("asc", "desc"):
            raise ParseFailure(args[1][1], frozenset({"asc", "desc"}))
        return SortBy(column, order)

    if op == OP_SELECT_COLUMN:
        expect_args(1)
        items = _bracket_items(*args[0])
        if not items:
            raise ParseFailure(args[0][1], frozenset({"non-empty column list"}))
        return SelectColumn(tuple(_unquote_name(*item) for item in items))

    if op == OP_SELECT_ROW:
        expect_args(1)
        chunk, chunk_off = args[0]
        if chunk.lstrip().startswith("["):
            items = _bracket_items(chunk, chunk_off)
            if not items:
                raise ParseFailure(chunk_off, frozenset({"non-empty index list"}))
            indices = []
            for item, item_off in items:
                if not _INT_RE.fullmatch(item.strip()):
                    raise ParseFailure(item_off, frozenset({"integer row index"}))
                indices.append(int(item.strip()))
            return SelectRow(tuple(indices))
        return SelectRow(parse_predicate(chunk, chunk_off))

    # f_add_column
    expect_args(2)
    name = _unquote_name(*args[0])
    body_chunk, body_off = args[1]
    if body_chunk.lstrip().startswith("["):
        items = _bracket_items(body_chunk, body_off)
        return AddColumn(name, tuple(_parse_value_item(*item) for item in items))
    return AddColumn(name, parse_expression(body_chunk, body_off))


def parse_operation_call(
    text: str, allowed: Iterable[str] | None = None
) -> OperationCall:
    """Extract the first syntactically complete operation call from text.

    ``allowed`` restricts the recognized operation pool (the END sentinel is
    always recognized); calls to operations outside the pool do not parse.
    Raises ParseFailure when no complete call is found.
    """
    pool = tuple(allowed) if allowed is not None else ALL_OPERATIONS
    for name in pool:
        if name not in ALL_OPERATIONS:
            raise ValueError(f"unknown operation name: {name!r}")
    anchor_re = _anchor_regex(pool)
    first_failure: ParseFailure | None = None
    for anchor in anchor_re.finditer(text):
        try:
            return _parse_call_at(text, anchor, pool)
        except ParseFailure as exc:
            if first_failure is None:
                first_failure = exc
    if first_failure is not None:
        raise first_failure
    raise ParseFailure(0, frozenset(pool + (END_TOKEN,)))


# --- canonical formatting -----------------------------------------------------

_BARE_ITEM_RE = re.compile(r"[^\s\"'\[\],][^\"'\[\],]*")


def _format_value_item(value: Value) -> str:
    if isinstance(value, Empty):
        return '""'  # a bare empty item would be ambiguous in 1-item lists
    text = value.text
    if _BARE_ITEM_RE.fullmatch(text) and text == text.strip():
        return text
    return quote_string(text)


def format_operation_call(call: OperationCall) -> str:
    """Canonical single-line rendering; round-trips through the parser."""
    if isinstance(call, End):
        return END_TOKEN
    if isinstance(call, GroupBy):
        return f"{OP_GROUP_BY}({format_name(call.column)})"
    if isinstance(call, SortBy):
        return f"{OP_SORT_BY}({format_name(call.column)}, {call.order})"
    if isinstance(call, SelectColumn):
        inner = ", ".join(_format_list_name(n) for n in call.names)
        return f"{OP_SELECT_COLUMN}([{inner}])"
    if isinstance(call, SelectRow):
        if isinstance(call.selector, tuple):
            inner = ", ".join(str(i) for i in call.selector)
            return f"{OP_SELECT_ROW}([{inner}])"
        return f"{OP_SELECT_ROW}({format_predicate(call.selector)})"
    if isinstance(call, AddColumn):
        if isinstance(call.body, tuple):
            inner = ", ".join(_format_value_item(v) for v in call.body)
            return f"{OP_ADD_COLUMN}({format_name(call.name)}, [{inner}])"
        return (
            f"{OP_ADD_COLUMN}({format_name(call.name)}, "
            f"{format_expression(call.body)})"
        )
    raise TypeError(f"not an operation call: {call!r}")


def _format_list_name(name: str) -> str:
    # List contexts accept bare multi-word names; quote only when the name
    # collides with list syntax or carries padding.
    if _BARE_ITEM_RE.fullmatch(name) and name == name.strip():
        return name
    return quote_string(name)
