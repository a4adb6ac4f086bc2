"""Deterministic CSV/JSON emission helpers.

All numeric output uses 17 significant decimal digits, enough to round-trip
binary64 exactly, and no timestamps are embedded, so identical invocations
produce byte-identical files.  Non-finite values (overflow / log of zero)
are written as empty CSV cells and JSON nulls.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Optional

__all__ = ["fmt_number", "meta_header", "rows_to_csv", "json_document", "parse_grid"]


def fmt_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return ""
    return format(x, ".17g")


def meta_header(meta: dict) -> str:
    return "".join(f"# {key} = {value}\n" for key, value in meta.items())


def rows_to_csv(rows: Iterable[dict], columns: list, meta: Optional[dict] = None) -> str:
    out = []
    if meta:
        out.append(meta_header(meta))
    out.append(",".join(columns) + "\n")
    for row in rows:
        out.append(",".join(fmt_number(row.get(c)) for c in columns) + "\n")
    return "".join(out)


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def json_document(rows, meta: dict) -> str:
    return json.dumps({"meta": _json_safe(meta), "rows": _json_safe(rows)},
                      indent=2, sort_keys=False) + "\n"


def parse_grid(spec: str) -> list:
    """Parse "start:stop:step" into an inclusive float grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be 'start:stop:step', got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"grid requires stop >= start and step > 0, got {spec!r}")
    n = int(round((stop - start) / step))
    grid = [start + i * step for i in range(n + 1)]
    if grid[-1] > stop + 1e-12:
        grid.pop()
    return grid
