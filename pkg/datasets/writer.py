"""Dataset writer: CSV/JSON figure datasets written atomically (temp file, then rename)"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Sequence, TextIO, Union

FORMATS = ("csv", "json")


def format_value(value: Any) -> str:
    """Cell text: 17 significant digits for floats, blank for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render(columns: Sequence[str], rows: List[Dict[str, Any]], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(col)) for col in columns])
        return buf.getvalue()
    if fmt == "json":
        payload = [{col: _json_value(row.get(col)) for col in columns} for row in rows]
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    raise ValueError(f"unknown dataset format {fmt!r}; expected one of {FORMATS}")


@contextmanager
def atomic_open(path: Union[str, Path]) -> Iterator[TextIO]:
    """Context manager for an all-or-nothing text file: replaced on success, untouched on error"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            yield fh
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def write_dataset(
    path: Union[str, Path],
    columns: Sequence[str],
    rows: List[Dict[str, Any]],
    fmt: str = "csv",
) -> int:
    """Write rows to path; returns the number of data rows written."""
    text = render(columns, rows, fmt)
    with atomic_open(path) as fh:
        fh.write(text)
    return len(rows)
