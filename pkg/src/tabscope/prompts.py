"""Versioned prompt template registry.

Templates are plain-text files under ``prompt_templates/<version>/`` with
``{UPPER_CASE}`` placeholders. Rendering is literal string substitution
(never ``str.format``, so braces inside table content are safe) and is
strict: an unfilled placeholder is an error.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from .errors import TemplateError
from .opcalls import ALL_OPERATIONS, END_TOKEN

_PLACEHOLDER_RE = re.compile(r"\{[A-Z][A-Z_]*\}")

DEFAULT_VERSION = "v1"

_GRAMMAR_LINES = {
    "f_add_column": (
        "- f_add_column(NAME, EXPR) or f_add_column(NAME, [v1, v2, ...]): "
        "append a new column computed from existing numeric columns "
        "(operators + - * /) or given as an explicit value list"
    ),
    "f_select_column": (
        "- f_select_column([c1, c2, ...]): keep only the listed columns"
    ),
    "f_select_row": (
        "- f_select_row([i1, i2, ...]) or f_select_row(PREDICATE): keep only "
        "the listed 1-based rows, or the rows matching a predicate such as "
        'Quarter == "Q2" AND Revenue > 100'
    ),
    "f_group_by": (
        "- f_group_by(COLUMN): collapse to one row per distinct value with "
        "its count"
    ),
    "f_sort_by": "- f_sort_by(COLUMN, asc|desc): order rows by a column",
}


def operation_grammar(allowed: tuple[str, ...] = ALL_OPERATIONS) -> str:
    """The instruction block offered to the planner; disabled operations
    are absent entirely."""
    lines = ["Choose exactly one next operation from:"]
    for op in ALL_OPERATIONS:
        if op in allowed:
            lines.append(_GRAMMAR_LINES[op])
    lines.append(
        f"Reply with a single operation call on one line, or {END_TOKEN} when "
        "the current table is ready to answer the question."
    )
    return "\n".join(lines)


class TemplateRegistry:
    """Loads named templates for one version, from package data or a dir."""

    def __init__(self, version: str = DEFAULT_VERSION, root: Path | None = None):
        self.version = version
        self._root = root
        self._cache: dict[str, str] = {}

    def raw(self, name: str) -> str:
        if name not in self._cache:
            if self._root is not None:
                path = self._root / self.version / f"{name}.txt"
                if not path.is_file():
                    raise TemplateError(f"no template {name!r} in {path.parent}")
                text = path.read_text(encoding="utf-8")
            else:
                package = resources.files(__package__) / "prompt_templates" / self.version
                candidate = package / f"{name}.txt"
                if not candidate.is_file():
                    raise TemplateError(
                        f"no template {name!r} for version {self.version!r}"
                    )
                text = candidate.read_text(encoding="utf-8")
            self._cache[name] = text
        return self._cache[name]

    def render(self, name: str, **slots: str) -> str:
        text = self.raw(name)
        for key in sorted(slots, key=len, reverse=True):
            text = text.replace("{" + key + "}", slots[key])
        leftover = _PLACEHOLDER_RE.search(text)
        if leftover:
            raise TemplateError(
                f"template {name!r} placeholder {leftover.group()} not filled"
            )
        return text.rstrip("\n")
