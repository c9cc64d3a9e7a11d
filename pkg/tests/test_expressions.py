from decimal import Decimal

import pytest

from tabscope.errors import CellTypeError, DivideByZeroError, ParseFailure
from tabscope.expressions import (
    And,
    BinaryOp,
    ColumnRef,
    Comparison,
    NumberLit,
    Or,
    eval_expression,
    eval_predicate,
    format_expression,
    format_predicate,
    parse_expression,
    parse_predicate,
)
from tabscope.table import EMPTY, Number, Text


def num(x) -> Number:
    return Number(str(x), Decimal(str(x)))


def test_parse_ratio_expression():
    expr = parse_expression("Revenue / RD")
    assert expr == BinaryOp("/", ColumnRef("Revenue"), ColumnRef("RD"))


def test_eval_ratio():
    expr = parse_expression("Revenue / RD")
    ctx = {"Revenue": num(100), "RD": num(20)}
    assert eval_expression(expr, ctx) == Number("5", Decimal(5))


def test_left_associativity():
    assert parse_expression("a - b - c") == BinaryOp(
        "-", BinaryOp("-", ColumnRef("a"), ColumnRef("b")), ColumnRef("c")
    )


def test_precedence():
    expr = parse_expression("a + b * 2")
    assert expr == BinaryOp(
        "+", ColumnRef("a"), BinaryOp("*", ColumnRef("b"), NumberLit(Decimal(2)))
    )


def test_parens_override_precedence():
    expr = parse_expression("(a + b) * 2")
    assert isinstance(expr, BinaryOp) and expr.op == "*"


def test_unicode_operator_aliases():
    assert parse_expression("a × b") == parse_expression("a * b")
    assert parse_expression("a ÷ b") == parse_expression("a / b")
    assert parse_expression("a − b") == parse_expression("a - b")


def test_quoted_column_name():
    expr = parse_expression('"R&D spend" + 1')
    assert expr.left == ColumnRef("R&D spend")


def test_negative_literal():
    assert parse_expression("-5") == NumberLit(Decimal(-5))
    assert parse_expression("a - -5") == BinaryOp(
        "-", ColumnRef("a"), NumberLit(Decimal(-5))
    )


def test_add_zero_identity():
    expr = parse_expression("x + 0")
    assert eval_expression(expr, {"x": num(7)}).magnitude == 7


def test_divide_by_zero():
    expr = parse_expression("A / B")
    with pytest.raises(DivideByZeroError):
        eval_expression(expr, {"A": num(1), "B": num(0)})


def test_empty_propagates_even_over_zero_division():
    expr = parse_expression("A / B")
    assert eval_expression(expr, {"A": EMPTY, "B": num(0)}) is EMPTY


def test_text_operand_is_type_error():
    expr = parse_expression("A + 1")
    with pytest.raises(CellTypeError):
        eval_expression(expr, {"A": Text("n/a")}, row_index=3)


def test_trailing_junk_rejected():
    with pytest.raises(ParseFailure):
        parse_expression("a + b extra")


def test_deep_nesting_bounded():
    with pytest.raises(ParseFailure):
        parse_expression("(" * 500 + "a" + ")" * 500)


def test_format_minimal_parens():
    expr = parse_expression("(a + b) * c")
    assert format_expression(expr) == "(a + b) * c"
    expr2 = parse_expression("a * b + c")
    assert format_expression(expr2) == "a * b + c"


def test_format_right_assoc_parens():
    tree = BinaryOp("-", ColumnRef("a"), BinaryOp("-", ColumnRef("b"), ColumnRef("c")))
    text = format_expression(tree)
    assert text == "a - (b - c)"
    assert parse_expression(text) == tree


# --- predicates -------------------------------------------------------------


def test_parse_simple_predicate():
    pred = parse_predicate('Quarter == "Q2"')
    assert pred == Comparison("Quarter", "==", "Q2")


def test_and_binds_tighter_than_or():
    pred = parse_predicate("a == 1 OR b == 2 AND c == 3")
    assert isinstance(pred, Or)
    assert isinstance(pred.right, And)


def test_predicate_keywords_case_insensitive():
    assert parse_predicate("a == 1 and b == 2") == parse_predicate(
        "a == 1 AND b == 2"
    )


def test_text_equality_case_insensitive():
    pred = parse_predicate('City == "PARIS"')
    assert eval_predicate(pred, {"City": Text("paris")})
    assert not eval_predicate(pred, {"City": Text("london")})


def test_not_equal_is_negation_of_equal():
    eq = Comparison("x", "==", Decimal(5))
    ne = Comparison("x", "!=", Decimal(5))
    for cell in (num(5), num(6), Text("5"), Text("y"), EMPTY):
        ctx = {"x": cell}
        assert eval_predicate(ne, ctx) == (not eval_predicate(eq, ctx))


def test_numeric_equality_by_magnitude():
    pred = parse_predicate("Score == 2000")
    assert eval_predicate(pred, {"Score": Number("2,000", Decimal(2000))})
    # numeric-looking text still matches by magnitude
    assert eval_predicate(parse_predicate('Score == "2000"'), {"Score": num(2000)})


def test_empty_never_equal():
    pred = parse_predicate('x == ""')
    assert not eval_predicate(pred, {"x": EMPTY})


def test_ordered_comparison():
    pred = parse_predicate("Score > 10")
    assert eval_predicate(pred, {"Score": num(11)})
    assert not eval_predicate(pred, {"Score": num(10)})
    assert not eval_predicate(pred, {"Score": EMPTY})


def test_ordered_comparison_on_text_errors():
    pred = parse_predicate("Name < 5")
    with pytest.raises(CellTypeError):
        eval_predicate(pred, {"Name": Text("abc")})


def test_ordered_comparison_against_text_literal_errors():
    pred = parse_predicate('Score < "abc"')
    with pytest.raises(CellTypeError):
        eval_predicate(pred, {"Score": num(1)})


def test_predicate_format_round_trip():
    for text in (
        'Quarter == "Q2"',
        "a < 5 AND b >= 2",
        '(a == 1 OR b == 2) AND c != "x"',
        "a == 1 OR (b == 2 OR c == 3)",
    ):
        pred = parse_predicate(text)
        assert parse_predicate(format_predicate(pred)) == pred
