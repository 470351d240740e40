"""Deterministic CSV writing and reading shared by all exports."""

from __future__ import annotations

import csv
import math
from typing import Iterable, Sequence


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(float(x))
    if hasattr(x, "item"):
        return fmt(x.item())
    return str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def read_csv(path) -> tuple[list[str], list[dict]]:
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.DictReader(fh)
        return list(r.fieldnames or []), list(r)


def parse_float(s: str) -> float:
    return math.nan if s == "" else float(s)


def parse_id(s: str):
    try:
        return int(s)
    except ValueError:
        return s
