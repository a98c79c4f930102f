from __future__ import annotations

import csv
from dataclasses import astuple, fields
from typing import Iterable, List, TextIO, Type


def header(row_type: Type) -> List[str]:
    return [f.name for f in fields(row_type)]


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_rows(rows: Iterable[object], row_type: Type, stream: TextIO) -> int:
    """Write the header and one line per row; returns the number of rows.

    Rows are written in the order given; callers sort them first.
    """
    writer = csv.writer(stream, lineterminator="\r\n")
    writer.writerow(header(row_type))
    count = 0
    for row in rows:
        writer.writerow([_cell(value) for value in astuple(row)])
        count += 1
    return count
