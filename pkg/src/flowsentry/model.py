"""Shared domain types: flow records, windows, labels, and the labeled pool."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Label(Enum):
    BENIGN = "benign"
    ATTACK = "attack"


@dataclass(frozen=True)
class GroundTruth:
    """Binary truth for a flow, with an optional attack-family tag."""

    label: Label
    family: str | None = None

    def __post_init__(self):
        if self.label is Label.BENIGN and self.family is not None:
            raise ValueError("benign flows carry no attack family")


@dataclass(eq=False)
class FlowRecord:
    """One network flow: a numeric feature vector plus optional ground truth.

    Ids are assigned at ingest in file order and are unique within a run.
    """

    id: int
    features: np.ndarray
    truth: GroundTruth | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reason: str | None = None


def validate_record(record: FlowRecord, expected_dim: int) -> ValidationResult:
    """Check feature dimensionality and finiteness. Pure; never raises."""
    if record.features.shape != (expected_dim,):
        return ValidationResult(False, "dimension mismatch")
    if not np.all(np.isfinite(record.features)):
        return ValidationResult(False, "non-finite value")
    return ValidationResult(True)


@dataclass(eq=False)
class Window:
    """An ordered batch of flow records processed as one unit at step `index`."""

    index: int
    records: list[FlowRecord]

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("window index must be non-negative")
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate record ids in window {self.index}")

    @property
    def size(self) -> int:
        return len(self.records)

    def feature_matrix(self) -> np.ndarray:
        return np.stack([r.features for r in self.records])


@dataclass(frozen=True)
class PoolEntry:
    record: FlowRecord
    label: Label
    source_window: int


class DuplicatePoolIdError(ValueError):
    pass


class LabeledPool:
    """Append-only pool of labeled records accumulated across windows."""

    def __init__(self):
        self.entries: list[PoolEntry] = []
        self._ids: set[int] = set()

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, record_id: int) -> bool:
        return record_id in self._ids

    @property
    def ids(self) -> frozenset[int]:
        return frozenset(self._ids)

    def copy(self) -> "LabeledPool":
        out = LabeledPool()
        out.entries = list(self.entries)
        out._ids = set(self._ids)
        return out

    def feature_matrix(self) -> np.ndarray:
        return np.stack([e.record.features for e in self.entries])

    def label_vector(self) -> np.ndarray:
        """Labels encoded 0 = benign, 1 = attack, aligned with entry order."""
        return np.array(
            [1 if e.label is Label.ATTACK else 0 for e in self.entries], dtype=np.int64
        )


def pool_extend(pool: LabeledPool, entries: list[PoolEntry]) -> LabeledPool:
    """Append labeled entries; rejects any id already pooled, atomically."""
    for e in entries:
        if e.record.id in pool._ids:
            raise DuplicatePoolIdError(f"record id {e.record.id} already in pool")
    seen = set()
    for e in entries:
        if e.record.id in seen:
            raise DuplicatePoolIdError(f"record id {e.record.id} duplicated in batch")
        seen.add(e.record.id)
    pool.entries.extend(entries)
    pool._ids.update(seen)
    return pool
