"""
Plot-ready result tables: CSV with '#' metadata lines, or JSON.

Floats are written with 17 significant digits so a CSV read back gives the
same doubles as the JSON payload.
"""

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from constants import OUTPUT_DIGITS
from errors import ConfigError

_INT = re.compile(r"^[+-]?\d+$")


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, **values):
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f"unknown columns {sorted(unknown)}")
        self.rows.append(tuple(values.get(c) for c in self.columns))

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, f".{OUTPUT_DIGITS}g")
    return str(value)


def _parse_value(text):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    if _INT.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def _jsonable(value):
    if isinstance(value, float) and value != value:
        return None
    return value


def to_csv(table):
    out = io.StringIO()
    for key, value in table.metadata.items():
        out.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return out.getvalue()


def to_json(table):
    payload = {
        "metadata": table.metadata,
        "columns": list(table.columns),
        "rows": [[_jsonable(v) for v in row] for row in table.rows],
    }
    return json.dumps(payload, indent=1, sort_keys=False) + "\n"


def render(table, output_format):
    if output_format == "csv":
        return to_csv(table)
    if output_format == "json":
        return to_json(table)
    raise ConfigError(f"unknown output format {output_format!r}", parameter="format")


def parse_table(text):
    """Inverse of render() for either format."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        payload = json.loads(stripped)
        return Table(tuple(payload["columns"]), [tuple(r) for r in payload["rows"]], payload["metadata"])

    metadata = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            metadata[key] = json.loads(value)
        elif line:
            body.append(line)
    reader = csv.reader(body)
    try:
        columns = tuple(next(reader))
    except StopIteration:
        raise ConfigError("table has no header row", parameter="table") from None
    rows = [tuple(_parse_value(cell) for cell in row) for row in reader]
    return Table(columns, rows, metadata)


def load_table(path):
    """Read a CSV or JSON table written by the CLI."""
    return parse_table(Path(path).read_text())
