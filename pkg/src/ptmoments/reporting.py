"""Deterministic CSV/JSON emission with a provenance header.

Every emitted file starts with a provenance block (target id, parameters,
seed, tool version, tolerance defaults) so a dataset is self-describing.
Writers are deterministic: no timestamps, fixed float formatting, fixed key
order, so identical runs produce identical bytes and re-emitting a parsed
file is the identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["Table", "write_table", "read_table", "format_value"]

_VERSION = "0.1.0"


def _normalize(v):
    """Collapse numpy scalars onto plain Python types."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def format_value(v) -> str:
    v = _normalize(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if v != v:  # nan
            return "nan"
        if v in (float("inf"), float("-inf")):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


@dataclass
class Table:
    """Columnar dataset plus its provenance mapping."""

    provenance: dict
    columns: list
    rows: list

    def __post_init__(self):
        base = {"tool": "ptmoments", "version": _VERSION}
        base.update(self.provenance)
        self.provenance = base


def write_table(table: Table, path, fmt: str = "csv") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        lines = [f"# {key}: {json.dumps(val, sort_keys=True)}"
                 for key, val in table.provenance.items()]
        lines.append(",".join(table.columns))
        for row in table.rows:
            lines.append(",".join(format_value(v) for v in row))
        path.write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        doc = {"provenance": table.provenance, "columns": table.columns,
               "rows": [[_jsonable(v) for v in row] for row in table.rows]}
        path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    return path


def _jsonable(v):
    v = _normalize(v)
    if isinstance(v, float) and (v != v or v in (float("inf"), float("-inf"))):
        return format_value(v)
    return v


def read_table(path) -> Table:
    """Parse a file written by write_table; round-trips byte-identically."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        doc = json.loads(text)
        return Table(doc["provenance"], doc["columns"], [tuple(r) for r in doc["rows"]])
    provenance = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("# "):
        key, _, raw = lines[i][2:].partition(": ")
        provenance[key] = json.loads(raw)
        i += 1
    columns = lines[i].split(",")
    rows = [tuple(_parse_cell(c) for c in line.split(","))
            for line in lines[i + 1:] if line]
    return Table(provenance, columns, rows)


def _parse_cell(cell: str):
    if cell == "true":
        return True
    if cell == "false":
        return False
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell
