"""Typed in-memory tables: parsing, serialization, token sizing.

A table is an immutable value: a tuple of column names plus a tuple of rows,
each row a tuple of cells. Cells are one of three variants: ``Number`` (keeps
the original string form alongside the parsed magnitude), ``Text``, or the
``EMPTY`` singleton. All operations in the package treat tables as read-only
and return new instances.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Iterable, Union

from .errors import (
    DuplicateColumnError,
    EmptySourceError,
    RaggedRowError,
    TableError,
)

# Magnitudes: optional sign, optional comma thousands-grouping, optional
# fractional part. No exponents, no bare leading dot.
_NUMBER_RE = re.compile(r"[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?")

_WORD_RE = re.compile(r"\w+")
_PUNCT_RE = re.compile(r"[^\w\s]")


def parse_number(text: str) -> Decimal | None:
    """Parse a numeric string (commas as thousands separators allowed).

    Returns None when the trimmed text is not a number under the cell rules.
    """
    stripped = text.strip()
    if not _NUMBER_RE.fullmatch(stripped):
        return None
    try:
        return Decimal(stripped.replace(",", ""))
    except InvalidOperation:  # pragma: no cover - regex precludes this
        return None


def canonical_decimal(value: Decimal) -> str:
    """Render a Decimal without exponent notation or trailing zeros."""
    if value == 0:
        return "0"
    return format(value.normalize(), "f")


@dataclass(frozen=True, slots=True)
class Number:
    """A numeric cell: the original string plus the parsed magnitude."""

    text: str
    magnitude: Decimal

    @classmethod
    def from_decimal(cls, magnitude: Decimal) -> "Number":
        return cls(canonical_decimal(magnitude), magnitude)


@dataclass(frozen=True, slots=True)
class Text:
    text: str


@dataclass(frozen=True, slots=True)
class Empty:
    def __bool__(self) -> bool:
        return False


EMPTY = Empty()

Value = Union[Number, Text, Empty]


def classify_cell(raw: str) -> Value:
    """Type a raw cell string: Number, Empty (whitespace-only), or Text."""
    if raw.strip() == "":
        return EMPTY
    magnitude = parse_number(raw)
    if magnitude is not None:
        return Number(raw, magnitude)
    return Text(raw)


def render_cell(value: Value) -> str:
    """The string form of a cell; Empty renders as the empty string."""
    if isinstance(value, Empty):
        return ""
    return value.text


def _canonical_name(name: str) -> str:
    return name.strip().casefold()


@dataclass(frozen=True)
class Table:
    """An ordered, typed table. Row order is significant everywhere."""

    column_names: tuple[str, ...]
    rows: tuple[tuple[Value, ...], ...]
    provenance: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if not self.column_names:
            raise TableError("a table needs at least one column")
        seen: set[str] = set()
        for name in self.column_names:
            if not name.strip():
                raise TableError("column names must be non-empty")
            canon = _canonical_name(name)
            if canon in seen:
                raise DuplicateColumnError(name)
            seen.add(canon)
        width = len(self.column_names)
        for i, row in enumerate(self.rows, start=1):
            if len(row) != width:
                raise RaggedRowError(i, width, len(row))

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.column_names)

    def column_index(self, name: str) -> int | None:
        """Resolve a column by case-insensitive, whitespace-trimmed match."""
        canon = _canonical_name(name)
        for i, existing in enumerate(self.column_names):
            if _canonical_name(existing) == canon:
                return i
        return None

    def column_values(self, index: int) -> tuple[Value, ...]:
        return tuple(row[index] for row in self.rows)


class SizeBucket(Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


SMALL_MEDIUM_THRESHOLD = 2000
MEDIUM_LARGE_THRESHOLD = 4000


def size_bucket(tokens: int) -> SizeBucket:
    """Bucket a token count. Both thresholds fall in the middle bucket."""
    if tokens < SMALL_MEDIUM_THRESHOLD:
        return SizeBucket.SMALL
    if tokens <= MEDIUM_LARGE_THRESHOLD:
        return SizeBucket.MEDIUM
    return SizeBucket.LARGE


def estimate_tokens(table: Table) -> int:
    """Deterministic token estimate over the pipe serialization.

    Counts maximal runs of word characters plus individual punctuation
    characters. This is a stable, tokenizer-free proxy, not a model
    tokenizer; bucket thresholds apply to these counts.
    """
    text = serialize_table(table, "pipe")
    return len(_WORD_RE.findall(text)) + len(_PUNCT_RE.findall(text))


# --- serialization -----------------------------------------------------------

_ESCAPES = {"\\": "\\\\", "\n": "\\n", "\t": "\\t"}


def _escape_cell(text: str, delimiter: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ch == delimiter:
            out.append("\\" + ch)
        else:
            out.append(ch)
    return "".join(out)


def _split_escaped(source: str, delimiter: str) -> list[list[str]]:
    """Split into records and fields honoring backslash escapes."""
    records: list[list[str]] = []
    fields: list[str] = []
    buf: list[str] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\\" and i + 1 < n:
            nxt = source[i + 1]
            if nxt == "n":
                buf.append("\n")
            elif nxt == "t":
                buf.append("\t")
            elif nxt == "\\" or nxt == delimiter:
                buf.append(nxt)
            else:
                buf.append(ch)
                buf.append(nxt)
            i += 2
            continue
        if ch == delimiter:
            fields.append("".join(buf))
            buf = []
        elif ch == "\n":
            fields.append("".join(buf))
            records.append(fields)
            fields = []
            buf = []
        else:
            buf.append(ch)
        i += 1
    fields.append("".join(buf))
    records.append(fields)
    # A trailing newline produces one empty final record; drop it.
    if records and records[-1] == [""]:
        records.pop()
    return records


def serialize_table(table: Table, style: str) -> str:
    """Serialize a table. Identical tables always produce identical bytes.

    ``pipe``: header, a per-column ``---`` separator row, then data rows,
    cells joined by `` | ``. Intended for prompts; not parseable back.

    ``tsv``: header-first tab-separated records with backslash-escaped
    delimiters, newlines, and backslashes inside cells; trailing newline.
    Text cells whose content would re-classify on parse (numeric-looking or
    whitespace-only strings, which only arise from explicit value lists) do
    not survive a round trip type-for-type.
    """
    if style == "pipe":
        lines = [" | ".join(table.column_names)]
        lines.append(" | ".join("---" for _ in table.column_names))
        for row in table.rows:
            lines.append(" | ".join(render_cell(v) for v in row))
        return "\n".join(lines)
    if style == "tsv":
        lines = ["\t".join(_escape_cell(n, "\t") for n in table.column_names)]
        for row in table.rows:
            lines.append(
                "\t".join(_escape_cell(render_cell(v), "\t") for v in row)
            )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown serialization style: {style!r}")


# --- parsing -------------------------------------------------------------------


def _table_from_records(
    records: list[list[str]], provenance: str | None
) -> Table:
    header, *data = records
    names = tuple(h.strip() for h in header)
    width = len(names)
    rows = []
    for i, record in enumerate(data, start=1):
        if len(record) != width:
            raise RaggedRowError(i, width, len(record))
        rows.append(tuple(classify_cell(cell) for cell in record))
    return Table(names, tuple(rows), provenance=provenance)


def _cell_from_json(value) -> Value:
    if value is None:
        return EMPTY
    if isinstance(value, bool):
        return Text(str(value).lower())
    if isinstance(value, (int, float)):
        return Number.from_decimal(Decimal(str(value)))
    if isinstance(value, str):
        return classify_cell(value)
    raise TableError(f"unsupported cell type in fixture table: {type(value).__name__}")


def table_from_json(obj: dict, provenance: str | None = None) -> Table:
    """Build a table from a fixture-style object with columns/rows keys."""
    if "table" in obj and isinstance(obj["table"], dict):
        obj = obj["table"]
    if "columns" not in obj or "rows" not in obj:
        raise TableError("fixture table needs 'columns' and 'rows' keys")
    names = tuple(str(c) for c in obj["columns"])
    width = len(names)
    rows = []
    for i, record in enumerate(obj["rows"], start=1):
        if len(record) != width:
            raise RaggedRowError(i, width, len(record))
        rows.append(tuple(_cell_from_json(cell) for cell in record))
    return Table(names, tuple(rows), provenance=provenance)


def parse_table(source: str, format: str, provenance: str | None = None) -> Table:
    """Parse a table from text in one of: ``tsv``, ``csv``, ``jsonl-fixture``.

    The first record is the header. Cells that parse as numbers become
    Number, whitespace-only cells become Empty, everything else Text.
    """
    if not source.strip():
        raise EmptySourceError("source is empty")
    if format == "tsv":
        return _table_from_records(_split_escaped(source, "\t"), provenance)
    if format == "csv":
        return _table_from_records(_split_escaped(source, ","), provenance)
    if format == "jsonl-fixture":
        first_line = next(line for line in source.splitlines() if line.strip())
        try:
            obj = json.loads(first_line)
        except json.JSONDecodeError as exc:
            raise TableError(f"invalid fixture JSON: {exc}") from exc
        return table_from_json(obj, provenance)
    raise ValueError(f"unknown table format: {format!r}")


def table_from_cells(
    column_names: Iterable[str], cells: Iterable[Iterable[str]]
) -> Table:
    """Convenience constructor: classify raw string cells into a table."""
    rows = tuple(tuple(classify_cell(c) for c in row) for row in cells)
    return Table(tuple(column_names), rows)
