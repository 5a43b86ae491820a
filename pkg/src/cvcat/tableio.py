"""Deterministic CSV/JSON table emission.

Identical inputs produce byte-identical files: floats are printed with 17
significant digits (round-trip safe), metadata carries no timestamps, and row
order is fixed by the caller.
"""

from __future__ import annotations

import io
import json
from typing import Any, Mapping, Sequence


def format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _flatten(meta: Mapping[str, Any], prefix: str = "") -> list[tuple[str, Any]]:
    items: list[tuple[str, Any]] = []
    for k, v in meta.items():
        key = f"{prefix}{k}"
        if isinstance(v, Mapping):
            items.extend(_flatten(v, f"{key}."))
        else:
            items.append((key, v))
    return items


def render_csv(meta: Mapping[str, Any], columns: Sequence[str],
               rows: Sequence[Mapping[str, Any]]) -> str:
    buf = io.StringIO()
    for key, val in _flatten(meta):
        buf.write(f"# {key} = {format_value(val)}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_value(row[c]) for c in columns) + "\n")
    return buf.getvalue()


def render_json(meta: Mapping[str, Any], columns: Sequence[str],
                rows: Sequence[Mapping[str, Any]]) -> str:
    payload = {
        "meta": dict(meta),
        "rows": [{c: row[c] for c in columns} for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def render_table(meta: Mapping[str, Any], columns: Sequence[str],
                 rows: Sequence[Mapping[str, Any]], fmt: str) -> str:
    if fmt == "csv":
        return render_csv(meta, columns, rows)
    if fmt == "json":
        return render_json(meta, columns, rows)
    raise ValueError(f"unknown format {fmt!r}")
