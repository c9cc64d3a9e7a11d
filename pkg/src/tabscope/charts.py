"""Deterministic chart rendering: bar, line, and scatter, emitted as SVG.

The renderer is intentionally self-contained: identical (table, spec)
inputs yield byte-identical SVG, which downstream caching and replay rely
on. An optional PNG rasterization (drawn directly with Pillow, same
geometry) serves vision providers that reject SVG.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .errors import EmptySeriesError, NoNumericColumnsError
from .table import Number, Table, render_cell

CHART_KINDS = ("bar", "line", "scatter")

WIDTH, HEIGHT = 640, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 64, 20, 44, 64
PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_H = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

_SERIES_COLORS = ("#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377")


@dataclass(frozen=True)
class ChartSpec:
    kind: str  # bar | line | scatter
    x_column: str
    y_columns: tuple[str, ...]
    title: str

    def __post_init__(self):
        if self.kind not in CHART_KINDS:
            raise ValueError(f"unknown chart kind: {self.kind!r}")
        if not self.y_columns:
            raise ValueError("a chart needs at least one y column")


@dataclass(frozen=True)
class RenderedChart:
    svg: bytes
    spec: ChartSpec
    png: bytes | None = None


def numeric_columns(table: Table) -> tuple[str, ...]:
    """Columns that are Number-typed in at least 80% of rows (min one cell)."""
    names = []
    for i, name in enumerate(table.column_names):
        count = sum(1 for c in table.column_values(i) if isinstance(c, Number))
        if count >= 1 and count * 5 >= table.n_rows * 4:
            names.append(name)
    return tuple(names)


def fallback_chart_spec(table: Table) -> ChartSpec:
    """The deterministic choice when no model proposal is available/valid:
    bar chart of the first numeric column against the first text column."""
    numeric = numeric_columns(table)
    if not numeric:
        raise NoNumericColumnsError()
    y = numeric[0]
    x = next(
        (n for n in table.column_names if n not in numeric),
        table.column_names[0],
    )
    return ChartSpec("bar", x, (y,), f"{y} by {x}")


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _fmt(value: float) -> str:
    return f"{value:.2f}".rstrip("0").rstrip(".")


@dataclass
class _Series:
    name: str
    color: str
    points: list[tuple[int, float]]  # (x slot, numeric value)


def _collect_series(table: Table, spec: ChartSpec) -> tuple[list[str], list[_Series], int]:
    x_index = table.column_index(spec.x_column)
    if x_index is None:
        raise EmptySeriesError()
    labels = [render_cell(row[x_index]) for row in table.rows]
    series = []
    skipped = 0
    for si, y_name in enumerate(spec.y_columns):
        y_index = table.column_index(y_name)
        if y_index is None:
            raise EmptySeriesError()
        points = []
        for slot, row in enumerate(table.rows):
            cell = row[y_index]
            if isinstance(cell, Number):
                points.append((slot, float(cell.magnitude)))
            else:
                skipped += 1
        series.append(
            _Series(table.column_names[y_index], _SERIES_COLORS[si % len(_SERIES_COLORS)], points)
        )
    if not any(s.points for s in series):
        raise EmptySeriesError()
    return labels, series, skipped


def _value_range(series: list[_Series], include_zero: bool) -> tuple[float, float]:
    values = [v for s in series for _, v in s.points]
    low, high = min(values), max(values)
    if include_zero:
        low, high = min(low, 0.0), max(high, 0.0)
    if low == high:
        high = low + 1.0
    return low, high


def _x_center(slot: int, n_slots: int) -> float:
    return MARGIN_LEFT + PLOT_W * (slot + 0.5) / max(n_slots, 1)


def _y_pixel(value: float, low: float, high: float) -> float:
    return MARGIN_TOP + PLOT_H * (1.0 - (value - low) / (high - low))


def render_chart(table: Table, spec: ChartSpec) -> RenderedChart:
    """Render the spec against the table into a standalone SVG 1.1 document."""
    labels, series, skipped = _collect_series(table, spec)
    n_slots = max(len(labels), 1)
    low, high = _value_range(series, include_zero=spec.kind == "bar")

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text class="title" x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-size="16">{_escape(spec.title)}</text>',
    ]
    # axes
    x0, y0 = MARGIN_LEFT, MARGIN_TOP + PLOT_H
    parts.append(
        f'<line x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}" stroke="#333"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{MARGIN_LEFT + PLOT_W}" y2="{y0}" stroke="#333"/>'
    )
    parts.append(
        f'<text class="axis-x" x="{MARGIN_LEFT + PLOT_W // 2}" y="{HEIGHT - 12}" '
        f'text-anchor="middle" font-size="12">{_escape(spec.x_column)}</text>'
    )
    y_label = ", ".join(spec.y_columns)
    parts.append(
        f'<text class="axis-y" x="14" y="{MARGIN_TOP + PLOT_H // 2}" font-size="12" '
        f'transform="rotate(-90 14 {MARGIN_TOP + PLOT_H // 2})" '
        f'text-anchor="middle">{_escape(y_label)}</text>'
    )

    if spec.kind == "bar":
        slot_width = PLOT_W / n_slots
        bar_width = slot_width * 0.8 / max(len(series), 1)
        zero_y = _y_pixel(0.0, low, high)
        for si, s in enumerate(series):
            for slot, value in s.points:
                left = MARGIN_LEFT + slot_width * slot + slot_width * 0.1 + bar_width * si
                top = min(_y_pixel(value, low, high), zero_y)
                height = abs(_y_pixel(value, low, high) - zero_y)
                parts.append(
                    f'<rect class="bar" x="{_fmt(left)}" y="{_fmt(top)}" '
                    f'width="{_fmt(bar_width)}" height="{_fmt(height)}" fill="{s.color}"/>'
                )
    elif spec.kind == "line":
        for s in series:
            coords = " ".join(
                f"{_fmt(_x_center(slot, n_slots))},{_fmt(_y_pixel(v, low, high))}"
                for slot, v in s.points
            )
            parts.append(
                f'<polyline class="line" points="{coords}" fill="none" '
                f'stroke="{s.color}" stroke-width="2"/>'
            )
    else:  # scatter
        for s in series:
            for slot, value in s.points:
                parts.append(
                    f'<circle class="point" cx="{_fmt(_x_center(slot, n_slots))}" '
                    f'cy="{_fmt(_y_pixel(value, low, high))}" r="4" fill="{s.color}"/>'
                )

    # x tick labels (thin out when crowded)
    stride = max(1, n_slots // 16)
    for slot, label in enumerate(labels):
        if slot % stride:
            continue
        parts.append(
            f'<text class="tick" x="{_fmt(_x_center(slot, n_slots))}" y="{y0 + 16}" '
            f'text-anchor="middle" font-size="10">{_escape(label[:14])}</text>'
        )
    # y extent labels
    parts.append(
        f'<text class="tick" x="{x0 - 6}" y="{MARGIN_TOP + 4}" text-anchor="end" '
        f'font-size="10">{_fmt(high)}</text>'
    )
    parts.append(
        f'<text class="tick" x="{x0 - 6}" y="{y0 + 4}" text-anchor="end" '
        f'font-size="10">{_fmt(low)}</text>'
    )
    if len(series) > 1:
        for si, s in enumerate(series):
            parts.append(
                f'<text class="legend" x="{MARGIN_LEFT + PLOT_W - 4}" '
                f'y="{MARGIN_TOP + 14 + 14 * si}" text-anchor="end" font-size="11" '
                f'fill="{s.color}">{_escape(s.name)}</text>'
            )
    if skipped:
        parts.append(
            f'<text class="footnote" x="{MARGIN_LEFT}" y="{HEIGHT - 12}" '
            f'font-size="10" fill="#666">{skipped} non-numeric cell(s) skipped</text>'
        )
    parts.append("</svg>")
    svg = "\n".join(parts).encode("utf-8")
    return RenderedChart(svg=svg, spec=spec)


def render_chart_png(table: Table, spec: ChartSpec) -> bytes:
    """Rasterize the same geometry with Pillow for SVG-averse providers."""
    from PIL import Image, ImageDraw

    labels, series, _skipped = _collect_series(table, spec)
    n_slots = max(len(labels), 1)
    low, high = _value_range(series, include_zero=spec.kind == "bar")

    image = Image.new("RGB", (WIDTH, HEIGHT), "white")
    draw = ImageDraw.Draw(image)
    x0, y0 = MARGIN_LEFT, MARGIN_TOP + PLOT_H
    draw.line([(x0, MARGIN_TOP), (x0, y0)], fill="#333333")
    draw.line([(x0, y0), (MARGIN_LEFT + PLOT_W, y0)], fill="#333333")
    draw.text((WIDTH // 2 - 4 * len(spec.title) // 2, 10), spec.title, fill="black")
    draw.text((MARGIN_LEFT + PLOT_W // 2 - 20, HEIGHT - 24), spec.x_column, fill="black")

    if spec.kind == "bar":
        slot_width = PLOT_W / n_slots
        bar_width = slot_width * 0.8 / max(len(series), 1)
        zero_y = _y_pixel(0.0, low, high)
        for si, s in enumerate(series):
            for slot, value in s.points:
                left = MARGIN_LEFT + slot_width * slot + slot_width * 0.1 + bar_width * si
                top = min(_y_pixel(value, low, high), zero_y)
                bottom = max(_y_pixel(value, low, high), zero_y)
                draw.rectangle([left, top, left + bar_width, bottom], fill=s.color)
    elif spec.kind == "line":
        for s in series:
            coords = [
                (_x_center(slot, n_slots), _y_pixel(v, low, high)) for slot, v in s.points
            ]
            if len(coords) > 1:
                draw.line(coords, fill=s.color, width=2)
            elif coords:
                draw.ellipse(_dot(coords[0]), fill=s.color)
    else:
        for s in series:
            for slot, value in s.points:
                draw.ellipse(
                    _dot((_x_center(slot, n_slots), _y_pixel(value, low, high))),
                    fill=s.color,
                )
    buffer = io.BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()


def _dot(center: tuple[float, float], r: float = 4.0):
    cx, cy = center
    return [cx - r, cy - r, cx + r, cy + r]
