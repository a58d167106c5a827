"""
TIES - Feature File I/O
Reads and writes TIES feature rows as CSV or JSONL.

CSV header: ``id,labels,v0_1..v0_D,v1_1..v1_D`` with labels joined by ``;``;
a label that is empty or contains ``;`` cannot be written to CSV.
JSONL rows: ``{"id": ..., "labels": [...], "v0": [...], "v1": [...]}``.
"""

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, List, TextIO, Union

import numpy as np
from dataclasses_json import dataclass_json

from ties.topology.features import TiesFeatureVector
from ties.utils.errors import ContractViolation

LABEL_SEPARATOR = ";"


class FeatureFormat(str, Enum):
    CSV = "csv"
    JSONL = "jsonl"

    @classmethod
    def for_path(cls, path: Union[str, Path]) -> "FeatureFormat":
        return cls.JSONL if str(path).endswith((".jsonl", ".json")) else cls.CSV


@dataclass_json
@dataclass
class FeatureRow:
    """One persisted document: id, sorted labels and the two sensitivity arrays."""

    id: str
    labels: List[str] = field(default_factory=list)
    v0: List[float] = field(default_factory=list)
    v1: List[float] = field(default_factory=list)

    @classmethod
    def from_vector(cls, vector: TiesFeatureVector, labels: Iterable[str] = ()) -> "FeatureRow":
        return cls(
            id=vector.doc_id,
            labels=sorted(labels),
            v0=[float(v) for v in vector.v0],
            v1=[float(v) for v in vector.v1],
        )

    @property
    def dimension(self) -> int:
        return len(self.v0)

    def values(self) -> np.ndarray:
        return np.asarray(self.v0 + self.v1, dtype=np.float64)


def csv_header(dimension: int) -> List[str]:
    return (["id", "labels"]
            + [f"v0_{d}" for d in range(1, dimension + 1)]
            + [f"v1_{d}" for d in range(1, dimension + 1)])


class FeatureWriter:
    """Streams feature rows to an open text handle in input order."""

    def __init__(self, handle: TextIO, fmt: FeatureFormat, dimension: int):
        self.handle = handle
        self.format = FeatureFormat(fmt)
        self.dimension = dimension
        self.count = 0
        self._csv = None
        if self.format is FeatureFormat.CSV:
            self._csv = csv.writer(handle, lineterminator="\n")
            self._csv.writerow(csv_header(dimension))

    def write(self, row: FeatureRow) -> None:
        if row.dimension != self.dimension or len(row.v1) != self.dimension:
            raise ContractViolation(f"row {row.id} has dimension {row.dimension}, expected {self.dimension}")
        if self._csv is not None:
            bad = [label for label in row.labels if not label or LABEL_SEPARATOR in label]
            if bad:
                raise ContractViolation(
                    f"row {row.id}: CSV labels must be non-empty and free of '{LABEL_SEPARATOR}', got {bad!r}"
                )
            self._csv.writerow(
                [row.id, LABEL_SEPARATOR.join(row.labels)]
                + [repr(v) for v in row.v0]
                + [repr(v) for v in row.v1]
            )
        else:
            self.handle.write(json.dumps(row.to_dict(), ensure_ascii=False) + "\n")
        self.count += 1


def write_features(rows: Iterable[FeatureRow], path: Union[str, Path], dimension: int,
                   fmt: Union[str, FeatureFormat, None] = None) -> int:
    fmt = FeatureFormat(fmt) if fmt else FeatureFormat.for_path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = FeatureWriter(f, fmt, dimension)
        for row in rows:
            writer.write(row)
    return writer.count


def read_features(path: Union[str, Path], fmt: Union[str, FeatureFormat, None] = None) -> List[FeatureRow]:
    """Load every row of a feature file."""
    fmt = FeatureFormat(fmt) if fmt else FeatureFormat.for_path(path)
    rows: List[FeatureRow] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        if fmt is FeatureFormat.JSONL:
            for line in f:
                if line.strip():
                    rows.append(FeatureRow.from_dict(json.loads(line)))
            return rows

        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            return rows
        if header[:2] != ["id", "labels"] or (len(header) - 2) % 2:
            raise ContractViolation(f"{path}: unexpected feature header")
        dimension = (len(header) - 2) // 2
        for line_number, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise ContractViolation(f"{path}:{line_number}: expected {len(header)} columns")
            labels = [label for label in record[1].split(LABEL_SEPARATOR) if label]
            numbers = [float(v) for v in record[2:]]
            rows.append(FeatureRow(id=record[0], labels=labels,
                                   v0=numbers[:dimension], v1=numbers[dimension:]))
    return rows
