"""Serializable experiment records (JSON and CSV)."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = 1


def to_plain(value):
    """Convert to JSON-safe values; fractions become ``"a/b"`` strings, non-finite floats strings."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_plain(v) for v in value]
    return str(value) if not isinstance(value, str) and value is not None else value


@dataclass
class ExperimentReport:
    command: str
    config: dict
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    ok: bool = True

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": to_plain(self.config),
            "ok": self.ok,
            "rows": to_plain(self.rows),
            "summary": to_plain(self.summary),
        }
        return json.dumps(payload, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.rows:
            columns = list(dict.fromkeys(k for row in self.rows for k in row))
            writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: _csv_cell(row.get(k, "")) for k in columns})
        for key, value in self.summary.items():
            buf.write(f"# {key}: {_csv_cell(value)}\n")
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


def _csv_cell(value):
    plain = to_plain(value)
    if isinstance(plain, list):
        return " ".join(str(v) for v in plain)
    if isinstance(plain, float):
        return repr(plain)
    return plain
