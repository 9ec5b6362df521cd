"""Reader for the sweep/bounds CSV artifacts (schema version 1).

This package deliberately never computes physics: everything it plots must
already be present in the CSV produced by the covert-sense CLI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

SUPPORTED_SCHEMA = "1"


class SchemaError(ValueError):
    """The input file does not match the expected CSV schema."""


@dataclass
class SweepTable:
    """Parsed CSV: header metadata, column order, and column arrays."""

    meta: dict
    columns: list[str]
    data: dict[str, np.ndarray]

    @property
    def parameters(self) -> dict:
        return self.meta.get("config", {}).get("parameters", {})

    def require(self, *names: str) -> None:
        for name in names:
            if name not in self.data:
                raise SchemaError(f"required column {name!r} is missing")

    def __len__(self) -> int:
        return len(next(iter(self.data.values()))) if self.data else 0


def read_table(path: str) -> SweepTable:
    with open(path, "r") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines or lines[0] != f"# schema={SUPPORTED_SCHEMA}":
        raise SchemaError(
            f"first line must be '# schema={SUPPORTED_SCHEMA}'"
        )
    meta: dict = {}
    columns: list[str] = []
    rows: list[list[float]] = []
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = json.loads(value) if key == "config" else value
        elif not columns:
            columns = line.split(",")
        else:
            cells = line.split(",")
            if len(cells) != len(columns):
                raise SchemaError(
                    f"row has {len(cells)} cells, expected {len(columns)}"
                )
            rows.append([float(c) for c in cells])
    if not columns:
        raise SchemaError("no column header found")
    if not rows:
        raise SchemaError("no data rows found")
    array = np.array(rows)
    data = {name: array[:, i] for i, name in enumerate(columns)}
    return SweepTable(meta=meta, columns=columns, data=data)
