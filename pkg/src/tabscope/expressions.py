"""Expression and predicate mini-language for computed columns and row filters.

Grammar (whitespace-insensitive between tokens)::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := ['-'] NUMBER | column | '(' expr ')'
    pred     := conj ('OR' conj)*
    conj     := cmp ('AND' cmp)*
    cmp      := column OP literal | '(' pred ')'
    OP       := '==' | '!=' | '<' | '<=' | '>' | '>='
    column   := IDENT | STRING
    literal  := ['-'] NUMBER | STRING

IDENT starts with a letter or underscore and may continue with word
characters plus ``& . % # '`` (so headers like ``R&D`` stay bare); anything
else must be double- or single-quoted. NUMBER is an unsigned decimal
literal; the unicode operators ``− × ÷`` are accepted as aliases.

Evaluation semantics: arithmetic runs on Number magnitudes; any Empty
operand makes the whole expression Empty; a Text operand is a cell type
error. Predicate equality never errors (mismatched types simply compare
unequal, and ``!=`` is the exact negation of ``==``); ordered comparisons
require numeric operands and raise on Text cells or Text literals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, DivisionByZero, InvalidOperation, localcontext
from typing import Union

from .errors import CellTypeError, DivideByZeroError, ParseFailure
from .table import EMPTY, Empty, Number, Text, Value, canonical_decimal, parse_number

_MAX_DEPTH = 64

_IDENT_RE = re.compile(r"[A-Za-z_][\w&.%#']*")
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")
_OP_ALIASES = {"−": "-", "×": "*", "÷": "/"}
_TWO_CHAR_OPS = ("==", "!=", "<=", ">=")
_ONE_CHAR_OPS = "+-*/<>()"
_KEYWORDS = frozenset({"and", "or", "asc", "desc"})


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER | IDENT | STRING | OP | EOF
    text: str
    pos: int


class _Lexer:
    """On-demand tokenizer; unlexable trailing prose is never touched."""

    def __init__(self, source: str, offset: int = 0):
        self.source = source
        self.offset = offset  # for error positions in a larger text
        self.pos = 0
        self._pushed: Token | None = None

    def _error(self, pos: int, expected: frozenset[str]) -> ParseFailure:
        return ParseFailure(self.offset + pos, expected)

    def peek(self) -> Token:
        if self._pushed is None:
            self._pushed = self._scan()
        return self._pushed

    def next(self) -> Token:
        tok = self.peek()
        self._pushed = None
        return tok

    def _scan(self) -> Token:
        src, n = self.source, len(self.source)
        i = self.pos
        while i < n and src[i].isspace():
            i += 1
        if i >= n:
            self.pos = i
            return Token("EOF", "", i)
        ch = src[i]
        if ch in _OP_ALIASES:
            self.pos = i + 1
            return Token("OP", _OP_ALIASES[ch], i)
        two = src[i : i + 2]
        if two in _TWO_CHAR_OPS:
            self.pos = i + 2
            return Token("OP", two, i)
        if ch in _ONE_CHAR_OPS:
            self.pos = i + 1
            return Token("OP", ch, i)
        if ch in "\"'":
            text, end = _scan_string(src, i)
            self.pos = end
            return Token("STRING", text, i)
        m = _NUMBER_RE.match(src, i)
        if m:
            self.pos = m.end()
            return Token("NUMBER", m.group(), i)
        m = _IDENT_RE.match(src, i)
        if m:
            self.pos = m.end()
            return Token("IDENT", m.group(), i)
        raise self._error(i, frozenset({"identifier", "number", "operator"}))


def _scan_string(src: str, start: int) -> tuple[str, int]:
    """Scan a quoted string starting at ``start``; returns (content, end)."""
    quote = src[start]
    out: list[str] = []
    i = start + 1
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\\" and i + 1 < n:
            nxt = src[i + 1]
            out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
            i += 2
            continue
        if ch == quote:
            return "".join(out), i + 1
        out.append(ch)
        i += 1
    raise ParseFailure(start, frozenset({"closing quote"}))


def quote_string(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    escaped = escaped.replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def is_bare_name(name: str) -> bool:
    """True when a column name can appear unquoted in the mini-language."""
    return bool(_IDENT_RE.fullmatch(name)) and name.casefold() not in _KEYWORDS


def format_name(name: str) -> str:
    return name if is_bare_name(name) else quote_string(name)


# --- expression AST -----------------------------------------------------------


@dataclass(frozen=True)
class ColumnRef:
    name: str


@dataclass(frozen=True)
class NumberLit:
    value: Decimal


@dataclass(frozen=True)
class BinaryOp:
    op: str  # one of + - * /
    left: "Expression"
    right: "Expression"


Expression = Union[ColumnRef, NumberLit, BinaryOp]

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


@dataclass(frozen=True)
class Comparison:
    column: str
    op: str  # == != < <= > >=
    literal: Decimal | str


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


Predicate = Union[Comparison, And, Or]


# --- parsing -------------------------------------------------------------------


class _ExprParser:
    def __init__(self, lexer: _Lexer):
        self.lx = lexer
        self.depth = 0

    def _fail(self, tok: Token, expected: set[str]) -> ParseFailure:
        return ParseFailure(self.lx.offset + tok.pos, frozenset(expected))

    def _enter(self, tok: Token):
        self.depth += 1
        if self.depth > _MAX_DEPTH:
            raise self._fail(tok, {"shallower nesting"})

    def expression(self) -> Expression:
        node = self.term()
        while True:
            tok = self.lx.peek()
            if tok.kind == "OP" and tok.text in ("+", "-"):
                self.lx.next()
                node = BinaryOp(tok.text, node, self.term())
            else:
                return node

    def term(self) -> Expression:
        node = self.factor()
        while True:
            tok = self.lx.peek()
            if tok.kind == "OP" and tok.text in ("*", "/"):
                self.lx.next()
                node = BinaryOp(tok.text, node, self.factor())
            else:
                return node

    def factor(self) -> Expression:
        tok = self.lx.next()
        if tok.kind == "OP" and tok.text == "-":
            num = self.lx.next()
            if num.kind != "NUMBER":
                raise self._fail(num, {"number"})
            return NumberLit(-Decimal(num.text))
        if tok.kind == "NUMBER":
            return NumberLit(Decimal(tok.text))
        if tok.kind in ("IDENT", "STRING"):
            return ColumnRef(tok.text)
        if tok.kind == "OP" and tok.text == "(":
            self._enter(tok)
            node = self.expression()
            closing = self.lx.next()
            if not (closing.kind == "OP" and closing.text == ")"):
                raise self._fail(closing, {")"})
            self.depth -= 1
            return node
        raise self._fail(tok, {"number", "column", "("})

    # predicates -------------------------------------------------------

    def predicate(self) -> Predicate:
        node = self.conjunction()
        while self._keyword("or"):
            node = Or(node, self.conjunction())
        return node

    def conjunction(self) -> Predicate:
        node = self.comparison()
        while self._keyword("and"):
            node = And(node, self.comparison())
        return node

    def _keyword(self, word: str) -> bool:
        tok = self.lx.peek()
        if tok.kind == "IDENT" and tok.text.casefold() == word:
            self.lx.next()
            return True
        return False

    def comparison(self) -> Predicate:
        tok = self.lx.peek()
        if tok.kind == "OP" and tok.text == "(":
            self.lx.next()
            self._enter(tok)
            node = self.predicate()
            closing = self.lx.next()
            if not (closing.kind == "OP" and closing.text == ")"):
                raise self._fail(closing, {")"})
            self.depth -= 1
            return node
        if tok.kind not in ("IDENT", "STRING"):
            raise self._fail(tok, {"column", "("})
        self.lx.next()
        column = tok.text
        op_tok = self.lx.next()
        if op_tok.kind != "OP" or op_tok.text not in ("==", "!=", "<", "<=", ">", ">="):
            raise self._fail(op_tok, {"==", "!=", "<", "<=", ">", ">="})
        lit_tok = self.lx.next()
        literal: Decimal | str
        if lit_tok.kind == "OP" and lit_tok.text == "-":
            num = self.lx.next()
            if num.kind != "NUMBER":
                raise self._fail(num, {"number"})
            literal = -Decimal(num.text)
        elif lit_tok.kind == "NUMBER":
            literal = Decimal(lit_tok.text)
        elif lit_tok.kind == "STRING":
            literal = lit_tok.text
        else:
            raise self._fail(lit_tok, {"number", "string literal"})
        return Comparison(column, op_tok.text, literal)


def _parse_complete(source: str, offset: int, production: str):
    lexer = _Lexer(source, offset)
    parser = _ExprParser(lexer)
    node = parser.expression() if production == "expr" else parser.predicate()
    trailing = lexer.peek()
    if trailing.kind != "EOF":
        raise ParseFailure(offset + trailing.pos, frozenset({"end of argument"}))
    return node


def parse_expression(source: str, offset: int = 0) -> Expression:
    return _parse_complete(source, offset, "expr")


def parse_predicate(source: str, offset: int = 0) -> Predicate:
    return _parse_complete(source, offset, "pred")


# --- canonical rendering --------------------------------------------------------


def format_expression(expr: Expression) -> str:
    """Canonical text; minimal parentheses such that parse∘format is identity."""
    return _format_expr(expr, 0, False)


def _format_expr(expr: Expression, parent_prec: int, is_right: bool) -> str:
    if isinstance(expr, NumberLit):
        return canonical_decimal(expr.value)
    if isinstance(expr, ColumnRef):
        return format_name(expr.name)
    prec = _PRECEDENCE[expr.op]
    left = _format_expr(expr.left, prec, False)
    right = _format_expr(expr.right, prec, True)
    text = f"{left} {expr.op} {right}"
    # The parser is left-associative, so a right child at equal precedence
    # needs parentheses to reconstruct the same tree.
    if prec < parent_prec or (is_right and prec == parent_prec):
        return f"({text})"
    return text


def format_predicate(pred: Predicate) -> str:
    return _format_pred(pred, 0, False)


_PRED_PRECEDENCE = {Or: 1, And: 2}


def _format_pred(pred: Predicate, parent_prec: int, is_right: bool) -> str:
    if isinstance(pred, Comparison):
        if isinstance(pred.literal, Decimal):
            lit = canonical_decimal(pred.literal)
        else:
            lit = quote_string(pred.literal)
        return f"{format_name(pred.column)} {pred.op} {lit}"
    prec = _PRED_PRECEDENCE[type(pred)]
    word = "OR" if isinstance(pred, Or) else "AND"
    left = _format_pred(pred.left, prec, False)
    right = _format_pred(pred.right, prec, True)
    text = f"{left} {word} {right}"
    if prec < parent_prec or (is_right and prec == parent_prec):
        return f"({text})"
    return text


# --- evaluation -----------------------------------------------------------------


def expression_columns(expr: Expression) -> set[str]:
    if isinstance(expr, ColumnRef):
        return {expr.name}
    if isinstance(expr, BinaryOp):
        return expression_columns(expr.left) | expression_columns(expr.right)
    return set()


def predicate_columns(pred: Predicate) -> set[str]:
    if isinstance(pred, Comparison):
        return {pred.column}
    return predicate_columns(pred.left) | predicate_columns(pred.right)


def eval_expression(
    expr: Expression, row_context: dict[str, Value], row_index: int | None = None
) -> Value:
    """Evaluate on one row. Empty propagates; Text operands are errors.

    Column names in ``row_context`` are expected pre-resolved (the engine
    maps case-insensitively before calling). Results carry a canonical
    decimal rendering.
    """
    result = _eval(expr, row_context, row_index)
    if isinstance(result, Empty):
        return EMPTY
    return Number.from_decimal(result)


def _eval(
    expr: Expression, ctx: dict[str, Value], row_index: int | None
) -> Decimal | Empty:
    if isinstance(expr, NumberLit):
        return expr.value
    if isinstance(expr, ColumnRef):
        value = ctx[expr.name]
        if isinstance(value, Empty):
            return EMPTY
        if isinstance(value, Text):
            raise CellTypeError(
                f"column {expr.name!r} holds text, expected a number", row_index
            )
        return value.magnitude
    left = _eval(expr.left, ctx, row_index)
    right = _eval(expr.right, ctx, row_index)
    if isinstance(left, Empty) or isinstance(right, Empty):
        return EMPTY
    with localcontext() as ctx_dec:
        ctx_dec.prec = 28
        try:
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            if expr.op == "*":
                return left * right
            return left / right
        except (DivisionByZero, InvalidOperation):
            raise DivideByZeroError(row_index) from None


def eval_predicate(
    pred: Predicate, row_context: dict[str, Value], row_index: int | None = None
) -> bool:
    if isinstance(pred, And):
        return eval_predicate(pred.left, row_context, row_index) and eval_predicate(
            pred.right, row_context, row_index
        )
    if isinstance(pred, Or):
        return eval_predicate(pred.left, row_context, row_index) or eval_predicate(
            pred.right, row_context, row_index
        )
    cell = row_context[pred.column]
    if pred.op in ("==", "!="):
        equal = _cells_equal(cell, pred.literal)
        return equal if pred.op == "==" else not equal
    return _ordered_compare(cell, pred, row_index)


def _cells_equal(cell: Value, literal: Decimal | str) -> bool:
    if isinstance(cell, Empty):
        return False
    if isinstance(literal, Decimal):
        if isinstance(cell, Number):
            return cell.magnitude == literal
        parsed = parse_number(cell.text)
        return parsed is not None and parsed == literal
    # string literal: numbers compare by magnitude when the literal is
    # numeric, otherwise case-insensitively on the raw text
    literal_number = parse_number(literal)
    if isinstance(cell, Number):
        return literal_number is not None and cell.magnitude == literal_number
    return cell.text.strip().casefold() == literal.strip().casefold()


def _ordered_compare(cell: Value, pred: Comparison, row_index: int | None) -> bool:
    literal = pred.literal
    if isinstance(literal, str):
        parsed = parse_number(literal)
        if parsed is None:
            raise CellTypeError(
                f"ordered comparison against text literal {literal!r}", row_index
            )
        literal = parsed
    if isinstance(cell, Empty):
        return False
    if isinstance(cell, Text):
        raise CellTypeError(
            f"ordered comparison on text cell in column {pred.column!r}", row_index
        )
    a, b = cell.magnitude, literal
    if pred.op == "<":
        return a < b
    if pred.op == "<=":
        return a <= b
    if pred.op == ">":
        return a > b
    return a >= b
