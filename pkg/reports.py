"""
Reports Module

This module delivers results to files or stdout in the two machine-readable
formats the command line offers.

Responsibilities:
    - JSON payloads stamped with the output schema version
    - CSV tables with a header row and 9-significant-digit numbers
    - Creating output directories and reporting where files went

Dependencies:
    - json, csv: serialization
    - config: schema version and CSV precision
"""

import io
import csv
import json
import logging
import sys
from enum import Enum
from pathlib import Path

from config import CSV_SIGNIFICANT_DIGITS, SCHEMA_VERSION

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")


def format_value(value) -> str:
    """
    Render one CSV cell.

    Floats use CSV_SIGNIFICANT_DIGITS significant digits, booleans 'true'/'false',
    None an empty cell and lists are joined with ';'.
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"
    if isinstance(value, (list, tuple)):
        return ";".join(format_value(v) for v in value)
    return str(value)


def render_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    """
    Render rows as CSV text.

    Args:
        rows: Dictionaries sharing the same keys
        columns: Column order; defaults to the keys of the first row

    Returns:
        Header line plus one line per row
    """
    if not rows:
        raise ValueError("Nothing to write: no rows")
    columns = columns or list(rows[0])
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(col)) for col in columns])
    return buffer.getvalue()


def write_csv(rows: list[dict], path: str | Path, columns: list[str] | None = None) -> Path:
    """
    Write rows to a CSV file, creating parent directories.

    Returns:
        The path written

    Raises:
        OSError: if the file cannot be written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(rows, columns), encoding="utf-8")
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def _jsonable(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return value.item()  # numpy scalar
    return value


def build_payload(command: str, body: dict) -> dict:
    """Wrap a command result with schema_version and command name."""
    return {"schema_version": SCHEMA_VERSION, "command": command, **body}


def to_json(payload: dict) -> str:
    """Serialize a payload; floats keep their full repr so values round-trip."""
    return json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n"


def emit(text: str, output: str | Path | None = None) -> None:
    """
    Send rendered output to a file, or to stdout when output is None or '-'.

    Raises:
        OSError: if the file cannot be written
    """
    if output is None or str(output) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Output written to {path}")
