"""Canonical CSV writing: shortest round-trip floats, ``#`` comments, ``nan``."""

from __future__ import annotations

import math
from typing import IO, Iterable, Sequence, Union

Cell = Union[float, int, str]


def fmt(x: Cell) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_rows(out: IO[str], header: Sequence[str], rows: Iterable[Union[Sequence[Cell], str]], comments: Sequence[str] = ()) -> None:
    """Rows given as a string are written as ``# <string>`` comment lines."""
    for c in comments:
        out.write(f"# {c}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        if isinstance(row, str):
            out.write(f"# {row}\n")
        else:
            out.write(",".join(fmt(v) for v in row) + "\n")


def read_rows(text: str) -> tuple[list[str], list[str], list[Union[list[float], str]]]:
    """Parse text produced by :func:`write_rows`.

    Returns (leading comments, header, rows) where comment lines after the
    header stay in place as strings.
    """
    comments: list[str] = []
    header: list[str] = []
    rows: list[Union[list[float], str]] = []
    for line in text.splitlines():
        if line.startswith("#"):
            body = line[2:] if line.startswith("# ") else line[1:]
            (rows if header else comments).append(body)
        elif not header:
            header = line.split(",")
        else:
            rows.append([float(v) for v in line.split(",")])
    return comments, header, rows
