"""CSV/JSON emission for CLI runs.

Every artifact embeds a header block (schema version, tool version, command,
seed, resolved config) ahead of the data so a run can be reproduced from its
output alone. Floats are written with 17 significant digits so values
round-trip bit-exactly; nothing time- or host-dependent is ever written.
"""

from __future__ import annotations

import json
from typing import Any

SCHEMA_VERSION = 1


def format_value(value: Any) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.16e}"
    return str(value)


def render_csv(config_dict: dict, tool_version: str, columns: list[str],
               rows: list[dict]) -> str:
    lines = [
        f"# schema={SCHEMA_VERSION}",
        f"# tool_version={tool_version}",
        f"# command={config_dict['command']}",
        f"# seed={config_dict['seed']}",
        "# config=" + json.dumps(config_dict, sort_keys=True),
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(format_value(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def render_json(config_dict: dict, tool_version: str, payload: dict) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "tool_version": tool_version,
        "command": config_dict["command"],
        "seed": config_dict["seed"],
        "config": config_dict,
    }
    doc.update(payload)
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def parse_csv_output(text: str) -> tuple[dict, list[str], list[dict]]:
    """Invert `render_csv`: header metadata, column names, typed rows."""
    meta: dict[str, Any] = {}
    columns: list[str] = []
    rows: list[dict] = []
    for line in text.splitlines():
        if not line:
            continue
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = json.loads(value) if key == "config" else value
        elif not columns:
            columns = line.split(",")
        else:
            cells = line.split(",")
            row = {}
            for name, cell in zip(columns, cells):
                try:
                    row[name] = int(cell)
                except ValueError:
                    try:
                        row[name] = float(cell)
                    except ValueError:
                        row[name] = cell
            rows.append(row)
    return meta, columns, rows
