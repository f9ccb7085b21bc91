"""CSV flow ingestion, incomplete-row deletion, and feature standardization."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import FlowRecord, GroundTruth, Label

DEFAULT_LABEL_COLUMN = "Label"


@dataclass(frozen=True)
class Scaler:
    """Per-feature mean/std statistics for z-score standardization."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=np.float64))
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=np.float64))
        if self.mu.shape != self.sigma.shape:
            raise ValueError("mu and sigma must have the same length")
        if np.any(self.sigma < 0):
            raise ValueError("sigma entries must be non-negative")

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


def _to_float(cell: str) -> float:
    """Numeric parse where blank or non-numeric cells become NaN (treated as missing)."""
    cell = cell.strip()
    if not cell:
        return np.nan
    try:
        return float(cell)
    except ValueError:
        return np.nan


def parse_flow_csv(
    path: str | Path,
    label_column: str | None = DEFAULT_LABEL_COLUMN,
    start_id: int = 0,
) -> tuple[list[FlowRecord], list[str]]:
    """Parse a flow CSV into records, one per data row.

    Numeric columns become features in header order. When `label_column` is
    present, "BENIGN" (case-insensitive) maps to a benign truth and any other
    value to an attack truth carrying the raw string as the family tag.
    Malformed rows (wrong column count, blank or non-numeric feature cells)
    yield records with NaN features so `drop_incomplete` can delete and count
    them. Returns (records, feature_names); ids are assigned in file order
    starting at `start_id`.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, header row required")
        header = [h.strip() for h in header]
        label_idx = None
        if label_column is not None:
            if label_column not in header:
                raise ValueError(f"{path}: label column {label_column!r} not in header")
            label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]
        dim = len(feature_names)

        records: list[FlowRecord] = []
        next_id = start_id
        for row in reader:
            if len(row) != len(header):
                features = np.full(dim, np.nan)
                truth = None
            else:
                cells = [c for i, c in enumerate(row) if i != label_idx]
                features = np.array([_to_float(c) for c in cells])
                truth = None
                if label_idx is not None:
                    raw = row[label_idx].strip()
                    if not raw:
                        truth = None
                    elif raw.upper() == "BENIGN":
                        truth = GroundTruth(Label.BENIGN)
                    else:
                        truth = GroundTruth(Label.ATTACK, family=raw)
            records.append(FlowRecord(id=next_id, features=features, truth=truth))
            next_id += 1
    return records, feature_names


def drop_incomplete(records: list[FlowRecord]) -> tuple[list[FlowRecord], int]:
    """Delete rows with missing or non-finite feature values."""
    clean = [r for r in records if np.all(np.isfinite(r.features))]
    return clean, len(records) - len(clean)


def fit_scaler(records: list[FlowRecord]) -> Scaler:
    """Fit per-feature mean and population (divisor N) standard deviation."""
    if len(records) < 2:
        raise ValueError("scaler fitting requires at least 2 records")
    X = np.stack([r.features for r in records])
    return Scaler(mu=X.mean(axis=0), sigma=X.std(axis=0))


def fit_scaler_matrix(X: np.ndarray) -> Scaler:
    if X.shape[0] < 2:
        raise ValueError("scaler fitting requires at least 2 records")
    return Scaler(mu=X.mean(axis=0), sigma=X.std(axis=0))


def transform_matrix(scaler: Scaler, X: np.ndarray) -> np.ndarray:
    """Standardize rows of X; zero-variance columns map to 0."""
    if X.shape[1] != scaler.dim:
        raise ValueError(f"expected {scaler.dim} features, got {X.shape[1]}")
    sigma = np.where(scaler.sigma == 0, 1.0, scaler.sigma)
    out = (X - scaler.mu) / sigma
    out[:, scaler.sigma == 0] = 0.0
    return out


def apply_scaler(scaler: Scaler, record: FlowRecord) -> FlowRecord:
    """Standardize one record; id and truth are unchanged."""
    if record.features.shape != (scaler.dim,):
        raise ValueError(
            f"record {record.id}: expected {scaler.dim} features, got {record.features.shape[0]}"
        )
    features = transform_matrix(scaler, record.features[None, :])[0]
    return FlowRecord(id=record.id, features=features, truth=record.truth)


def write_flow_csv(
    path: str | Path,
    records: list[FlowRecord],
    feature_names: list[str],
    label_column: str = DEFAULT_LABEL_COLUMN,
) -> None:
    """Serialize records back to the CSV format `parse_flow_csv` reads."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + [label_column])
        for r in records:
            if r.truth is None:
                label = ""
            elif r.truth.label is Label.BENIGN:
                label = "BENIGN"
            else:
                label = r.truth.family or "ATTACK"
            writer.writerow([repr(float(v)) for v in r.features] + [label])
