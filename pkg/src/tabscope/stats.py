"""Exact per-column statistics over the numeric cells of a table."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .table import Number, Table, canonical_decimal


@dataclass(frozen=True)
class ColumnStats:
    name: str
    minimum: Decimal
    maximum: Decimal
    mean: Fraction  # exact; render via mean_text
    count: int

    @property
    def mean_text(self) -> str:
        return fraction_text(self.mean)


@dataclass(frozen=True)
class StatBlock:
    columns: tuple[ColumnStats, ...] = ()

    def get(self, name: str) -> ColumnStats | None:
        wanted = name.strip().casefold()
        for column in self.columns:
            if column.name.strip().casefold() == wanted:
                return column
        return None

    def __bool__(self) -> bool:
        return bool(self.columns)


def fraction_text(value: Fraction) -> str:
    """Exact decimal rendering when finite, else shortest float round trip."""
    denominator = value.denominator
    twos = fives = 0
    while denominator % 2 == 0:
        denominator //= 2
        twos += 1
    while denominator % 5 == 0:
        denominator //= 5
        fives += 1
    if denominator != 1:
        return repr(float(value))
    shift = max(twos, fives)
    scaled = abs(value.numerator) * 10**shift // value.denominator
    digits = str(scaled).rjust(shift + 1, "0")
    whole, frac = digits[: len(digits) - shift], digits[len(digits) - shift :]
    text = whole + ("." + frac if frac.rstrip("0") else "")
    if frac.rstrip("0"):
        text = whole + "." + frac.rstrip("0")
    sign = "-" if value < 0 else ""
    return canonical_decimal(Decimal(sign + text))


def compute_statistics(table: Table) -> StatBlock:
    """Min/max/mean per column, over Number cells only (exact arithmetic).

    Columns without a single numeric value are omitted.
    """
    stats = []
    for i, name in enumerate(table.column_names):
        values = [
            cell.magnitude for cell in table.column_values(i) if isinstance(cell, Number)
        ]
        if not values:
            continue
        total = Fraction(0)
        for v in values:
            total += Fraction(v)
        stats.append(
            ColumnStats(
                name=name,
                minimum=min(values),
                maximum=max(values),
                mean=total / len(values),
                count=len(values),
            )
        )
    return StatBlock(tuple(stats))


def render_stat_block(stats: StatBlock) -> str:
    """Deterministic text rendering used in prompts and offline summaries."""
    if not stats:
        return "No numeric columns."
    lines = [
        f"{c.name}: min {canonical_decimal(c.minimum)}, "
        f"max {canonical_decimal(c.maximum)}, "
        f"mean {c.mean_text} over {c.count} values."
        for c in stats.columns
    ]
    return "\n".join(lines)
