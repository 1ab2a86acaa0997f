"""Daily load vectors, consumer demands, and peak-to-average arithmetic.

Energy quantities are real-valued kWh on a fixed grid of uniform time slots.
Slots are labelled 1..slot_count in messages and CSV headers; Python-side
indexing is 0-based. All types here are immutable after construction and safe
to share across threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

#: Absolute tolerance for energy comparisons, in kWh.
EPSILON_KWH = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """A day split into uniform slots labelled 1..slot_count."""

    slot_count: int

    def __post_init__(self):
        if self.slot_count < 2:
            raise ValueError(f"a time grid needs at least 2 slots, got {self.slot_count}")


@dataclass(frozen=True)
class LoadVector:
    """Per-slot energy quantities (kWh) over one day, all entries >= 0."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) < 2:
            raise ValueError("a load vector needs at least 2 slots")
        for i, v in enumerate(self.values):
            if v < 0.0:
                raise ValueError(f"negative load {v} kWh at slot {i + 1}")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, index: int) -> float:
        return self.values[index]

    def __iter__(self):
        return iter(self.values)

    def peak(self) -> float:
        return max(self.values)


@dataclass(frozen=True)
class ConsumerDemand:
    """One consumer's daily demand profile. Total demand must be positive."""

    consumer_id: int
    demand: LoadVector

    def __post_init__(self):
        if total_load(self.demand) <= 0.0:
            raise ValueError(f"consumer {self.consumer_id} has zero total demand")


def total_load(vector: LoadVector) -> float:
    """Total daily energy of a load vector, in kWh."""
    return sum(vector.values)


def aggregate(demands: Iterable[ConsumerDemand], slot_count: int | None = None) -> LoadVector:
    """Slot-wise sum of consumer demands.

    ``slot_count`` is required for an empty collection (the result is the
    all-zeros vector of that length). Mixed vector lengths are an error.
    """
    demands = list(demands)
    if not demands:
        if slot_count is None:
            raise ValueError("slot_count is required to aggregate an empty collection")
        return LoadVector((0.0,) * slot_count)
    n = len(demands[0].demand)
    if slot_count is not None and slot_count != n:
        raise ValueError(f"slot_count {slot_count} does not match demand length {n}")
    totals = [0.0] * n
    for d in demands:
        if len(d.demand) != n:
            raise ValueError(
                f"consumer {d.consumer_id} has {len(d.demand)} slots, expected {n}"
            )
        for i, v in enumerate(d.demand.values):
            totals[i] += v
    return LoadVector(tuple(totals))


def par(vector: LoadVector) -> float:
    """Peak-to-average ratio: slot_count * max / total. 1 means perfectly flat."""
    total = total_load(vector)
    if total <= EPSILON_KWH:
        raise ValueError("PAR is undefined for an all-zero load vector")
    return len(vector) * vector.peak() / total


# ---------------------------------------------------------------------------
# CSV interchange
#
# Load rows use columns slot_1..slot_N; demand files prepend a consumer_id
# column. kWh values are written via repr() so they round-trip exactly.
# ---------------------------------------------------------------------------


def slot_headers(slot_count: int) -> list[str]:
    return [f"slot_{i}" for i in range(1, slot_count + 1)]


def read_load_rows(path) -> list[tuple[int | None, LoadVector]]:
    """Read (row_id, LoadVector) pairs from a CSV file.

    Accepts either a bare slot_1..slot_N header or a consumer_id column
    followed by the slot columns.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty CSV")
        header = [h.strip() for h in header]
        has_id = header[0] == "consumer_id"
        slots = header[1:] if has_id else header
        if slots != slot_headers(len(slots)):
            raise ValueError(f"{path}: expected slot_1..slot_N columns, got {slots}")
        rows: list[tuple[int | None, LoadVector]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{line_no}: expected {len(header)} columns")
            if has_id:
                rid: int | None = int(row[0])
                vals = row[1:]
            else:
                rid = None
                vals = row
            rows.append((rid, LoadVector(tuple(float(v) for v in vals))))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def read_demands_csv(path) -> list[ConsumerDemand]:
    """Read per-consumer demand rows (consumer_id, slot_1..slot_N)."""
    demands = []
    for rid, vector in read_load_rows(path):
        if rid is None:
            raise ValueError(f"{path}: demand rows need a consumer_id column")
        demands.append(ConsumerDemand(rid, vector))
    return demands


def write_demands_csv(path, demands: Sequence[ConsumerDemand]) -> None:
    if not demands:
        raise ValueError("nothing to write")
    n = len(demands[0].demand)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["consumer_id"] + slot_headers(n))
        for d in demands:
            writer.writerow([d.consumer_id] + [repr(v) for v in d.demand.values])
