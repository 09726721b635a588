"""Reader for the simulator's CSV contract.

A table file starts with ``#``-prefixed lines holding one JSON object (run
metadata), followed by a ``name (unit)`` header row and float rows.  This
module is deliberately self-contained: the renderer talks to the simulator
only through these files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class ContractError(ValueError):
    """Input file violates the table contract."""


@dataclass
class Table:
    name: str
    columns: list[str]
    units: dict[str, str]
    data: dict[str, list[float]]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list[float]:
        if name not in self.data:
            raise ContractError(column_diff_report(self.name, [name], self.columns))
        return self.data[name]

    def run_meta(self, key: str, default=None):
        return self.metadata.get("run", {}).get(key, default)


def column_diff_report(table: str, expected: list[str], found: list[str]) -> str:
    missing = [c for c in expected if c not in found]
    extra = [c for c in found if c not in expected]
    lines = [f"table {table!r}: column contract violation"]
    if missing:
        lines.append(f"  missing: {', '.join(missing)}")
    if extra:
        lines.append(f"  present but unexpected: {', '.join(extra)}")
    lines.append(f"  expected: {', '.join(expected)}")
    lines.append(f"  found:    {', '.join(found)}")
    return "\n".join(lines)


def read_table(path: str) -> Table:
    meta_lines: list[str] = []
    header: list[str] | None = None
    rows: list[list[float]] = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ContractError(f"cannot read table {path}: {exc}") from exc
    with fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                meta_lines.append(line.lstrip("# "))
                continue
            if header is None:
                header = [tok.strip() for tok in line.split(",")]
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise ContractError(f"{path}: malformed data row {line!r}") from exc
    if not meta_lines:
        raise ContractError(f"{path}: missing metadata header")
    if header is None:
        raise ContractError(f"{path}: missing column header row")
    try:
        metadata = json.loads("".join(meta_lines))
    except json.JSONDecodeError as exc:
        raise ContractError(f"{path}: malformed metadata header: {exc}") from exc
    if not isinstance(metadata, dict) or "table" not in metadata:
        raise ContractError(f"{path}: metadata header lacks the table name")

    columns: list[str] = []
    units: dict[str, str] = {}
    for tok in header:
        if tok.endswith(")") and "(" in tok:
            name, _, unit = tok.rpartition("(")
            name = name.strip()
            units[name] = unit[:-1]
        else:
            name = tok
            units[name] = ""
        columns.append(name)
    for i, row in enumerate(rows):
        if len(row) != len(columns):
            raise ContractError(f"{path}: row {i} width {len(row)} != header width {len(columns)}")
    data = {name: [row[j] for row in rows] for j, name in enumerate(columns)}
    return Table(
        name=str(metadata["table"]),
        columns=columns,
        units=units,
        data=data,
        metadata=metadata,
    )
