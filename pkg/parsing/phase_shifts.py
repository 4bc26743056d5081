"""Parser for phase-shift tables: `p_lab_MeV,delta0_<unit>,delta1_<unit>` with unit deg or rad"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, List, TextIO, Union

from nn.smatrix import PhaseShiftRecord

UNIT_SCALE = {"deg": math.pi / 180.0, "rad": 1.0}


class ParseError(ValueError):
    """Raised for a malformed phase-shift row or header; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnitError(ValueError):
    """Raised when a phase column names an angle unit other than deg or rad."""


class NonMonotonic(ValueError):
    """Raised when p_lab is not strictly increasing down the table."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _column_scale(name: str, expected: str, line: int) -> float:
    prefix = expected + "_"
    if not name.startswith(prefix):
        raise ParseError(f"expected column {prefix}<unit>, got {name!r}", line)
    unit = name[len(prefix):]
    if unit not in UNIT_SCALE:
        raise UnitError(f"unknown angle unit {unit!r} in column {name!r}; use deg or rad")
    return UNIT_SCALE[unit]


def _data_lines(handle: TextIO) -> Iterable[tuple]:
    # Skip blanks and '#' comments but keep real line numbers for error messages
    for lineno, raw in enumerate(handle, start=1):
        text = raw.strip()
        if text and not text.startswith("#"):
            yield lineno, text


def parse_phase_shifts(handle: TextIO) -> List[PhaseShiftRecord]:
    lines = list(_data_lines(handle))
    if not lines:
        raise ParseError("empty phase-shift table", 1)

    header_line, header_text = lines[0]
    header = [col.strip() for col in next(csv.reader([header_text]))]
    if len(header) != 3 or header[0] != "p_lab_MeV":
        raise ParseError(f"header must be p_lab_MeV,delta0_<unit>,delta1_<unit>, got {header_text!r}", header_line)
    scale0 = _column_scale(header[1], "delta0", header_line)
    scale1 = _column_scale(header[2], "delta1", header_line)

    records: List[PhaseShiftRecord] = []
    previous = -math.inf
    for lineno, text in lines[1:]:
        fields = [f.strip() for f in next(csv.reader([text]))]
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", lineno)
        try:
            p_lab, d0, d1 = (float(f) for f in fields)
        except ValueError:
            bad = next(f for f in fields if not _is_float(f))
            raise ParseError(f"non-numeric field {bad!r}", lineno) from None
        if not all(math.isfinite(v) for v in (p_lab, d0, d1)):
            raise ParseError("non-finite value", lineno)
        if p_lab < 0:
            raise ParseError(f"p_lab must be >= 0, got {p_lab}", lineno)
        if p_lab <= previous:
            raise NonMonotonic(f"p_lab {p_lab} does not exceed previous {previous}", lineno)
        previous = p_lab
        records.append(PhaseShiftRecord(p_lab=p_lab, delta0=d0 * scale0, delta1=d1 * scale1))

    return records


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_phase_shifts(source: Union[str, Path, TextIO]) -> List[PhaseShiftRecord]:
    """Read a phase-shift CSV from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with Path(source).open("r", encoding="utf-8", newline="") as fh:
            return parse_phase_shifts(fh)
    if isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        return parse_phase_shifts(source)
    raise TypeError(f"unsupported phase-shift source {type(source).__name__}")
