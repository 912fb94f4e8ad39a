"""Probability tables over states and their CSV form.

Rows are ``positions;species;probability[;stderr]`` with the composite
fields comma-separated, e.g. ``0,1;2,1;0.0183``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, TextIO

from .model import MarkovState

__all__ = ["Distribution", "read_csv"]


@dataclass
class Distribution:
    probs: dict[MarkovState, float]
    stderr: Optional[dict[MarkovState, float]] = None
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, st: MarkovState) -> float:
        return self.probs.get(st, 0.0)

    def total(self) -> float:
        return math.fsum(self.probs.values())

    def restrict(self, lo: int, hi: int) -> "Distribution":
        keep = {s: v for s, v in self.probs.items() if lo <= s.positions[0] and s.positions[-1] <= hi}
        se = None if self.stderr is None else {s: self.stderr[s] for s in keep}
        return Distribution(keep, se, dict(self.info))

    def max_abs_diff(self, other: "Distribution") -> float:
        keys = set(self.probs) | set(other.probs)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)

    def mean_abs_diff(self, other: "Distribution") -> float:
        keys = set(self.probs) | set(other.probs)
        if not keys:
            return 0.0
        return sum(abs(self[k] - other[k]) for k in keys) / len(keys)

    def write_csv(self, fh: TextIO):
        w = csv.writer(fh, delimiter=";", lineterminator="\n")
        header = ["positions", "species", "probability"]
        if self.stderr is not None:
            header.append("stderr")
        w.writerow(header)
        for st in sorted(self.probs):
            row = [
                ",".join(map(str, st.positions)),
                ",".join(map(str, st.species)),
                repr(float(self.probs[st])),
            ]
            if self.stderr is not None:
                row.append(repr(float(self.stderr[st])))
            w.writerow(row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def read_csv(fh: TextIO) -> Distribution:
    rows = csv.reader(fh, delimiter=";")
    header = next(rows)
    if header[:3] != ["positions", "species", "probability"]:
        raise ValueError(f"unexpected header {header}")
    has_se = len(header) > 3 and header[3] == "stderr"
    probs, se = {}, {} if has_se else None
    for row in rows:
        if not row:
            continue
        st = MarkovState(
            tuple(int(v) for v in row[0].split(",")),
            tuple(int(v) for v in row[1].split(",")),
        )
        probs[st] = float(row[2])
        if has_se:
            se[st] = float(row[3])
    return Distribution(probs, se)
