"""Knowledge-guided table reasoning with a symbolic operation engine."""

from .table import (
    EMPTY,
    Empty,
    Number,
    SizeBucket,
    Table,
    Text,
    Value,
    classify_cell,
    estimate_tokens,
    parse_table,
    serialize_table,
    size_bucket,
    table_from_cells,
)
from .opcalls import (
    ALL_OPERATIONS,
    AddColumn,
    End,
    GroupBy,
    OperationCall,
    SelectColumn,
    SelectRow,
    SortBy,
    format_operation_call,
    parse_operation_call,
)
from .engine import OperationHistory, apply, replay
from .errors import TabscopeError

__version__ = "0.1.0"

__all__ = [
    "ALL_OPERATIONS",
    "AddColumn",
    "EMPTY",
    "Empty",
    "End",
    "GroupBy",
    "Number",
    "OperationCall",
    "OperationHistory",
    "SelectColumn",
    "SelectRow",
    "SizeBucket",
    "SortBy",
    "Table",
    "TabscopeError",
    "Text",
    "Value",
    "apply",
    "classify_cell",
    "estimate_tokens",
    "format_operation_call",
    "parse_operation_call",
    "parse_table",
    "replay",
    "serialize_table",
    "size_bucket",
    "table_from_cells",
    "__version__",
]
