"""CSV and JSON writing/reading for reports.

CSV numbers are rendered with 17 significant digits so margins reproduce
bit-for-bit across runs; the readers below parse everything the writers emit.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path


def fmt17(value) -> str:
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".17g")


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt17(v) for v in row])


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt17(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv(path) -> dict[str, list]:
    """Columns as lists, floats where parseable."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns: dict[str, list] = {name: [] for name in header}
        for row in reader:
            for name, raw in zip(header, row):
                try:
                    columns[name].append(float(raw))
                except ValueError:
                    columns[name].append(raw)
    return columns


def write_json(path, payload) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json_text(payload))


def json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def read_json(path):
    return json.loads(Path(path).read_text())


def suite_payload(reports: list[dict]) -> dict:
    """Array of case reports plus the {total, passed, failed} summary."""
    ordered = sorted(reports, key=lambda r: (r.get("case", ""), r.get("surface", ""),
                                             r.get("test_function", ""),
                                             r.get("n", 0), str(r.get("sigma", ""))))
    passed = sum(1 for r in ordered if r.get("pass"))
    return {
        "reports": ordered,
        "summary": {"total": len(ordered), "passed": passed,
                    "failed": len(ordered) - passed},
    }
