"""Verification records and their CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

COLUMNS = ("estimate", "lhs", "rhs_scale", "ratio", "status", "fingerprint", "grid", "extra")

_STATUS = re.compile(r"^(ok|inadmissible-input|below-resolution|clamped-cells\(\d+\))$")


def clamped(k: int) -> str:
    return f"clamped-cells({k})"


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def safe_ratio(lhs: float, rhs_scale: float) -> float:
    if rhs_scale > 0:
        return lhs / rhs_scale
    if lhs == 0:
        return 0.0
    return math.nan


@dataclass
class Report:
    estimate: str
    lhs: float
    rhs_scale: float
    ratio: float = None
    status: str = "ok"
    fingerprint: str = ""
    grid: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs_scale = float(self.rhs_scale)
        if self.ratio is None:
            self.ratio = safe_ratio(self.lhs, self.rhs_scale)
        self.ratio = float(self.ratio)
        if not _STATUS.match(self.status):
            raise ValueError(f"unknown status {self.status!r}")
        self.extra = _plain(self.extra)

    @property
    def ok(self) -> bool:
        return self.status != "inadmissible-input"

    def row(self) -> list[str]:
        return [
            self.estimate,
            repr(self.lhs),
            repr(self.rhs_scale),
            repr(self.ratio),
            self.status,
            self.fingerprint,
            self.grid,
            json.dumps(self.extra, sort_keys=True, separators=(",", ":")),
        ]

    @classmethod
    def from_row(cls, row: dict) -> Report:
        return cls(
            row["estimate"],
            float(row["lhs"]),
            float(row["rhs_scale"]),
            float(row["ratio"]),
            row["status"],
            row["fingerprint"],
            row["grid"],
            json.loads(row["extra"]) if row["extra"] else {},
        )


def to_csv(reports: Iterable[Report]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def write_csv(path, reports: Sequence[Report]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(to_csv(reports))


def read_csv(path) -> list[Report]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [Report.from_row(r) for r in reader]


def merge(paths: Sequence) -> str:
    """Concatenate report CSVs, keeping a single header."""
    lines = [",".join(COLUMNS)]
    for p in paths:
        with open(p, newline="") as fh:
            text = fh.read().splitlines()
        if not text:
            continue
        if text[0] != lines[0]:
            raise ValueError(f"{p}: header does not match the report schema")
        lines.extend(text[1:])
    return "\n".join(lines) + "\n"
