"""Structured result records with lossless serialization.

A ResultRecord echoes the canonical inputs, carries the computed data
(scalars plus an optional table) and provenance (tool version, config hash,
timestamp).  JSON and CSV emissions both round-trip without precision loss:
floats are written with 17 significant digits, and the CSV embeds the
non-tabular part of the record in comment lines.  Timestamps live in the
provenance only, never in data rows, so identical configs produce
byte-identical numeric output.
"""

import json
import time
from dataclasses import dataclass, field

from . import __version__

__all__ = ["ResultRecord", "write_json", "read_json", "write_csv", "read_csv"]


@dataclass
class ResultRecord:
    """Inputs echo, computed data and provenance for one command run."""

    inputs: dict
    data: dict
    provenance: dict = field(default_factory=dict)

    @classmethod
    def create(cls, inputs: dict, data: dict, config_hash: str) -> "ResultRecord":
        return cls(
            inputs=inputs,
            data=data,
            provenance={
                "tool": "trapcoherence",
                "version": __version__,
                "config_hash": config_hash,
                "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            },
        )

    def to_dict(self) -> dict:
        return {"inputs": self.inputs, "data": self.data, "provenance": self.provenance}

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRecord":
        return cls(inputs=d["inputs"], data=d["data"], provenance=d.get("provenance", {}))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_json(record: ResultRecord, path) -> None:
    """Serialize the full record; json round-trips Python floats exactly."""
    with open(path, "w") as fh:
        json.dump(record.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> ResultRecord:
    with open(path) as fh:
        return ResultRecord.from_dict(json.load(fh))


def write_csv(record: ResultRecord, path) -> None:
    """Emit the record's table as CSV rows at full precision.

    Everything that is not the table (inputs, provenance, scalar data) is
    embedded in a single '# record:' comment line so the file parses back
    into a complete ResultRecord.
    """
    table = record.data.get("table")
    head = {
        "inputs": record.inputs,
        "provenance": record.provenance,
        "data": {k: v for k, v in record.data.items() if k != "table"},
    }
    with open(path, "w", newline="") as fh:
        fh.write("# record: " + json.dumps(head, sort_keys=True) + "\n")
        if table is not None:
            fh.write(",".join(table["columns"]) + "\n")
            for row in table["rows"]:
                fh.write(",".join(_fmt(cell) for cell in row) + "\n")


def read_csv(path) -> ResultRecord:
    head = None
    columns = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# record: "):
                head = json.loads(line[len("# record: "):])
                continue
            if line.startswith("#") or not line:
                continue
            cells = line.split(",")
            if columns is None:
                columns = cells
                continue
            parsed = []
            for cell in cells:
                try:
                    parsed.append(float(cell))
                except ValueError:
                    parsed.append(cell)
            rows.append(parsed)
    if head is None:
        raise ValueError(f"{path}: missing '# record:' header line")
    record = ResultRecord.from_dict(head)
    if columns is not None:
        record.data["table"] = {"columns": columns, "rows": rows}
    return record
