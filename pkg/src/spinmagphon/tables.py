"""Machine-readable result tables: CSV with a JSON metadata header.

Every emitted file starts with ``#``-prefixed lines holding one JSON object
(constants hash, full parameter snapshot, cutoffs, tool version), followed by
a ``name (unit)`` header row and the data rows.  Floats are written with
``repr`` so files are byte-identical across runs and round-trip exactly.
Failed sweep points never produce rows; they go to a ``.errors.json`` sidecar.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field


class TableError(ValueError):
    """Contract violation while building or writing a result table."""


@dataclass
class ResultTable:
    name: str
    columns: list[tuple[str, str]]          # (name, unit)
    rows: list[tuple[float, ...]] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add_row(self, values) -> None:
        values = tuple(float(v) for v in values)
        if len(values) != len(self.columns):
            raise TableError(
                f"{self.name}: row width {len(values)} != header width {len(self.columns)}"
            )
        for v in values:
            if not math.isfinite(v):
                raise TableError(f"{self.name}: non-finite value {v!r} in row")
        self.rows.append(values)

    def column(self, name: str) -> list[float]:
        names = [c[0] for c in self.columns]
        if name not in names:
            raise TableError(f"{self.name}: no column {name!r} (have {names})")
        i = names.index(name)
        return [row[i] for row in self.rows]

    def validate(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise TableError(f"{self.name}: ragged row")
            if any(not math.isfinite(v) for v in row):
                raise TableError(f"{self.name}: non-finite value")


def _header_lines(table: ResultTable) -> list[str]:
    meta = dict(table.metadata)
    meta["table"] = table.name
    meta["columns"] = [{"name": n, "unit": u} for n, u in table.columns]
    blob = json.dumps(meta, sort_keys=True, separators=(",", ":"))
    return [f"# {blob}"]


def write_csv(table: ResultTable, path: str, force: bool = False) -> str:
    """Write the table; refuses to overwrite unless ``force``."""
    table.validate()
    if os.path.exists(path) and not force:
        raise TableError(f"refusing to overwrite {path} (pass force)")
    lines = _header_lines(table)
    lines.append(",".join(f"{n} ({u})" for n, u in table.columns))
    for row in table.rows:
        lines.append(",".join(repr(v) for v in row))
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
    return path


def write_json(table: ResultTable, path: str, force: bool = False) -> str:
    """Optional JSON mirror of the same table."""
    table.validate()
    if os.path.exists(path) and not force:
        raise TableError(f"refusing to overwrite {path} (pass force)")
    meta = dict(table.metadata)
    meta["table"] = table.name
    payload = {
        "metadata": meta,
        "columns": [{"name": n, "unit": u} for n, u in table.columns],
        "rows": [list(r) for r in table.rows],
    }
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    os.replace(tmp, path)
    return path


def read_csv(path: str) -> ResultTable:
    """Parse a table written by :func:`write_csv` (used by tests and tooling)."""
    meta_lines: list[str] = []
    header = None
    rows: list[tuple[float, ...]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                meta_lines.append(line.lstrip("# "))
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(tuple(float(tok) for tok in line.split(",")))
    if header is None:
        raise TableError(f"{path}: no header row")
    try:
        meta = json.loads("".join(meta_lines)) if meta_lines else {}
    except json.JSONDecodeError as exc:
        raise TableError(f"{path}: malformed metadata header: {exc}") from exc
    columns = []
    for tok in header:
        tok = tok.strip()
        if tok.endswith(")") and "(" in tok:
            name, _, unit = tok.rpartition("(")
            columns.append((name.strip(), unit[:-1]))
        else:
            columns.append((tok, ""))
    table = ResultTable(
        name=str(meta.get("table", os.path.basename(path))),
        columns=columns,
        metadata={k: v for k, v in meta.items() if k not in ("table", "columns")},
    )
    for row in rows:
        table.add_row(row)
    return table


def write_error_report(path: str, errors: list[dict]) -> str | None:
    """Sidecar report of failed sweep points; nothing is written when empty."""
    if not errors:
        return None
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump({"failures": errors}, fh, sort_keys=True, indent=1)
        fh.write("\n")
    os.replace(tmp, path)
    return path
