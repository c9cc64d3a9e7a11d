"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TabscopeError(Exception):
    """Base class for every error raised by this package."""


# --- table construction / ingestion ---------------------------------------


class TableError(TabscopeError):
    pass


class RaggedRowError(TableError):
    """A data row's cell count does not match the header."""

    def __init__(self, row_index: int, expected: int, got: int):
        self.row_index = row_index
        self.expected = expected
        self.got = got
        super().__init__(
            f"row {row_index} has {got} cells, expected {expected}"
        )


class DuplicateColumnError(TableError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate column name: {name!r}")


class EmptySourceError(TableError):
    pass


# --- operation engine ------------------------------------------------------


class OperationError(TabscopeError):
    """Base class for errors raised while executing a table operation."""


class UnknownColumnError(OperationError):
    def __init__(self, name: str, candidates: tuple[str, ...]):
        self.name = name
        self.candidates = candidates
        super().__init__(
            f"unknown column {name!r}; available: {', '.join(candidates)}"
        )


class IndexOutOfRangeError(OperationError):
    def __init__(self, index: int, row_count: int):
        self.index = index
        self.row_count = row_count
        super().__init__(f"row index {index} out of range 1..{row_count}")


class DuplicateIndexError(OperationError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"duplicate row index {index}")


class LengthMismatchError(OperationError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"value list has {got} items, table has {expected} rows")


class CellTypeError(OperationError):
    """A cell had the wrong type for the requested computation."""

    def __init__(self, message: str, row_index: int | None = None):
        self.row_index = row_index
        if row_index is not None:
            message = f"{message} (row {row_index})"
        super().__init__(message)


class DivideByZeroError(OperationError):
    def __init__(self, row_index: int | None = None):
        self.row_index = row_index
        suffix = f" (row {row_index})" if row_index is not None else ""
        super().__init__(f"division by zero{suffix}")


class EndNotExecutableError(OperationError):
    def __init__(self):
        super().__init__("<END> is a termination signal, not an executable operation")


# --- operation-call / mini-language parsing --------------------------------


class ParseFailure(TabscopeError):
    """Structured parse error: where it failed and what was expected."""

    def __init__(self, position: int, expected: frozenset[str], message: str = ""):
        self.position = position
        self.expected = expected
        detail = message or f"expected one of: {', '.join(sorted(expected))}"
        super().__init__(f"parse failure at position {position}: {detail}")


# --- model gateway ----------------------------------------------------------


class GatewayError(TabscopeError):
    pass


class BudgetExceededError(GatewayError):
    def __init__(self, stage: str, limit: int):
        self.stage = stage
        self.limit = limit
        super().__init__(f"query budget exhausted for stage {stage!r} (limit {limit})")


class TransientProviderError(GatewayError):
    """Transport-level failure worth retrying (connection errors, 5xx, 429)."""


class ProviderUnavailableError(GatewayError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"provider unavailable: {reason}")


class AuthMissingError(GatewayError):
    def __init__(self, env_var: str):
        self.env_var = env_var
        super().__init__(f"API key environment variable {env_var} is not set")


class ScriptMissError(GatewayError):
    def __init__(self, role: str, ordinal: int):
        self.role = role
        self.ordinal = ordinal
        super().__init__(f"no scripted response matches {role} request #{ordinal}")


class AmbiguousMatcherError(GatewayError):
    def __init__(self, role: str, ordinal: int, count: int):
        self.role = role
        self.ordinal = ordinal
        super().__init__(
            f"{count} scripted matchers fire on {role} request #{ordinal}"
        )


class RoleNotBoundError(GatewayError):
    def __init__(self, role: str):
        self.role = role
        super().__init__(f"no provider bound for model role {role!r}")


class NoVisionSupportError(GatewayError):
    def __init__(self, role: str):
        self.role = role
        super().__init__(f"provider bound for {role!r} does not accept image input")


# --- chart rendering ---------------------------------------------------------


class ChartError(TabscopeError):
    pass


class NoNumericColumnsError(ChartError):
    def __init__(self):
        super().__init__("table has no numeric column to plot")


class EmptySeriesError(ChartError):
    def __init__(self):
        super().__init__("no plottable points in the selected columns")


# --- datasets / harness -------------------------------------------------------


class DatasetError(TabscopeError):
    pass


class SchemaError(DatasetError):
    def __init__(self, record_index: int, message: str):
        self.record_index = record_index
        super().__init__(f"record {record_index}: {message}")


class MissingTableFileError(DatasetError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"referenced table file not found: {path}")


class EmptyRunError(TabscopeError):
    def __init__(self):
        super().__init__("cannot aggregate an empty record list")


class UnmappableVerdictError(TabscopeError):
    def __init__(self, raw: str):
        self.raw = raw
        super().__init__(f"response maps to neither true nor false: {raw!r}")


class TemplateError(TabscopeError):
    pass
