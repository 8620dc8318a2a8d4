"""Result tables: CSV with a ``#``-prefixed metadata header.

Floats are written with 17 significant digits, which round-trips every
IEEE double exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

FLOAT_FORMAT = ".17g"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        s = format(v, FLOAT_FORMAT)
        # keep floats distinguishable from ints on the way back in
        return s if any(c in s for c in ".eni") else s + ".0"
    if v is None:
        return ""
    return str(v)


def _parse(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column names")
        for r in self.rows:
            self._check(r)

    def _check(self, row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} values, expected {len(self.columns)}")

    def append(self, row):
        row = list(row)
        self._check(row)
        self.rows.append(row)

    def column(self, name) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}: {_fmt(v)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> ResultTable:
        meta = {}
        lines = text.splitlines()
        body = []
        for line in lines:
            if line.startswith("# ") and not body:
                key, _, value = line[2:].partition(": ")
                meta[key] = _parse(value)
            else:
                body.append(line)
        reader = csv.reader(body)
        columns = next(reader)
        rows = [[_parse(v) for v in r] for r in reader]
        return cls(columns, rows, meta)

    @classmethod
    def read(cls, path) -> ResultTable:
        with open(path, newline="") as fh:
            return cls.from_csv(fh.read())
