import random
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from tabscope.errors import ParseFailure
from tabscope.expressions import BinaryOp, ColumnRef, Comparison, NumberLit
from tabscope.opcalls import (
    ALL_OPERATIONS,
    AddColumn,
    End,
    GroupBy,
    SelectColumn,
    SelectRow,
    SortBy,
    format_operation_call,
    parse_operation_call,
)
from tabscope.table import EMPTY, Number, Text, classify_cell


def test_select_row_indices():
    assert parse_operation_call("f_select_row([1, 3])") == SelectRow((1, 3))


def test_prose_extraction():
    call = parse_operation_call("I will now f_sort_by(Score, desc) to order rows.")
    assert call == SortBy("Score", "desc")


def test_end_token_variants():
    assert parse_operation_call("<END>") == End()
    assert parse_operation_call("Done. < end >") == End()


def test_first_complete_call_wins():
    call = parse_operation_call("f_group_by(Party) then f_sort_by(x, asc)")
    assert call == GroupBy("Party")


def test_broken_first_call_falls_through_to_next():
    call = parse_operation_call("f_group_by(unclosed... but f_sort_by(A, asc) works")
    assert call == SortBy("A", "asc")


def test_select_column_multiword_names():
    call = parse_operation_call("f_select_column([home team, away team])")
    assert call == SelectColumn(("home team", "away team"))


def test_add_column_with_expression():
    call = parse_operation_call("f_add_column(Ratio, Revenue / R&D)")
    assert call == AddColumn(
        "Ratio", BinaryOp("/", ColumnRef("Revenue"), ColumnRef("R&D"))
    )


def test_add_column_with_value_list():
    call = parse_operation_call('f_add_column(Tag, [5, "Q2, extra", x, ])')
    assert call == AddColumn(
        "Tag",
        (
            Number("5", Decimal(5)),
            Text("Q2, extra"),
            Text("x"),
            EMPTY,
        ),
    )


def test_select_row_predicate():
    call = parse_operation_call('f_select_row(Quarter == "Q2")')
    assert call == SelectRow(Comparison("Quarter", "==", "Q2"))


def test_quoted_column_names():
    call = parse_operation_call('f_group_by("R&D spend (m)")')
    assert call == GroupBy("R&D spend (m)")


def test_case_insensitive_keywords():
    assert parse_operation_call("F_SORT_BY(score, DESC)") == SortBy("score", "desc")


def test_empty_column_list_rejected():
    with pytest.raises(ParseFailure):
        parse_operation_call("f_select_column([])")


def test_non_integer_index_rejected():
    with pytest.raises(ParseFailure):
        parse_operation_call("f_select_row([1, a])")


def test_parse_failure_carries_position_and_expected():
    with pytest.raises(ParseFailure) as exc:
        parse_operation_call("no call here at all")
    assert exc.value.position == 0
    assert exc.value.expected


def test_disabled_op_not_recognized():
    pool = tuple(op for op in ALL_OPERATIONS if op != "f_select_row")
    with pytest.raises(ParseFailure):
        parse_operation_call("f_select_row([1])", allowed=pool)
    # END always recognized
    assert parse_operation_call("<END>", allowed=pool) == End()


def test_format_examples():
    assert format_operation_call(SelectColumn(("A", "B"))) == "f_select_column([A, B])"
    assert format_operation_call(End()) == "<END>"
    assert format_operation_call(SelectRow((1, 3))) == "f_select_row([1, 3])"


# --- round-trip law -----------------------------------------------------------

_names = st.sampled_from(
    ["A", "b", "Score", "home team", "R&D", "Efficiency_Ratio", "x y z", "n/a col"]
)
_orders = st.sampled_from(["asc", "desc"])
_numbers = st.decimals(
    allow_nan=False, allow_infinity=False, places=2, min_value=-10_000, max_value=10_000
)


@st.composite
def expressions(draw, depth=0):
    if depth >= 3 or draw(st.booleans()):
        if draw(st.booleans()):
            return NumberLit(draw(_numbers))
        return ColumnRef(draw(_names))
    op = draw(st.sampled_from("+-*/"))
    return BinaryOp(
        op, draw(expressions(depth=depth + 1)), draw(expressions(depth=depth + 1))
    )


@st.composite
def predicates(draw, depth=0):
    from tabscope.expressions import And, Or

    if depth >= 2 or draw(st.booleans()):
        literal = draw(
            st.one_of(_numbers, st.sampled_from(["Q2", "n/a", "hello world", ""]))
        )
        op = draw(st.sampled_from(["==", "!=", "<", "<=", ">", ">="]))
        return Comparison(draw(_names), op, literal)
    klass = draw(st.sampled_from([And, Or]))
    return klass(draw(predicates(depth=depth + 1)), draw(predicates(depth=depth + 1)))


_values = st.one_of(
    st.just(EMPTY),
    _numbers.map(lambda d: Number.from_decimal(d)),
    st.sampled_from(["Q2", "hello world", "it's", "a,b", " padded "]).map(Text),
)


@st.composite
def operation_calls(draw):
    kind = draw(st.integers(0, 5))
    if kind == 0:
        body = draw(
            st.one_of(
                expressions(),
                st.lists(_values, max_size=4).map(tuple),
            )
        )
        return AddColumn(draw(_names), body)
    if kind == 1:
        names = draw(st.lists(_names, min_size=1, max_size=3, unique=True))
        return SelectColumn(tuple(names))
    if kind == 2:
        selector = draw(
            st.one_of(
                st.lists(
                    st.integers(1, 9), min_size=1, max_size=4, unique=True
                ).map(tuple),
                predicates(),
            )
        )
        return SelectRow(selector)
    if kind == 3:
        return GroupBy(draw(_names))
    if kind == 4:
        return SortBy(draw(_names), draw(_orders))
    return End()


@given(operation_calls())
def test_parse_format_round_trip(call):
    assert parse_operation_call(format_operation_call(call)) == call


def test_parser_total_on_noise():
    rng = random.Random(20240803)
    alphabet = "f_selct_rowumn([)]<END>,\"' \n\t=<>!&+-*/abcxyz0123456789\\"
    for _ in range(2000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 60)))
        try:
            parse_operation_call(text)
        except ParseFailure:
            pass


def test_value_item_classification_keeps_round_trip_total():
    # a quoted numeric string classifies as Number, so formatting emits it
    # bare and the round trip preserves the AST
    call = parse_operation_call('f_add_column(X, ["5.0"])')
    assert call.body[0] == classify_cell("5.0")
    assert parse_operation_call(format_operation_call(call)) == call
