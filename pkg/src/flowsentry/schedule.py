"""Window schedule construction: gradually introduce attack families across
window ranges, drawing records without replacement."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import FlowRecord, Window

NORMAL_FAMILY = "Normal"  # benign traffic bucket name in schedule specs


@dataclass(frozen=True)
class ScheduleRule:
    start: int  # 1-based window numbers, inclusive
    end: int
    mix: dict[str, float]  # family -> proportion of each window in the span


@dataclass(frozen=True)
class ScheduleSpec:
    total_windows: int
    window_size: int
    seed: int
    rules: tuple[ScheduleRule, ...]

    def __post_init__(self):
        covered = []
        for rule in self.rules:
            if rule.start < 1 or rule.end > self.total_windows or rule.start > rule.end:
                raise ValueError(f"rule span {rule.start}-{rule.end} out of range")
            covered.extend(range(rule.start, rule.end + 1))
            total = sum(rule.mix.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(
                    f"rule {rule.start}-{rule.end}: proportions sum to {total}, expected 1"
                )
        if sorted(covered) != list(range(1, self.total_windows + 1)):
            raise ValueError("rule spans must cover every window exactly once")

    @classmethod
    def from_json(cls, path: str | Path) -> "ScheduleSpec":
        doc = json.loads(Path(path).read_text())
        rules = tuple(
            ScheduleRule(start=r["start"], end=r["end"], mix=dict(r["mix"]))
            for r in doc["rules"]
        )
        return cls(
            total_windows=doc["total_windows"],
            window_size=doc["window_size"],
            seed=doc.get("seed", 0),
            rules=rules,
        )


def _window_counts(mix: dict[str, float], size: int) -> dict[str, int]:
    """Largest-remainder rounding of proportions to integer per-window counts."""
    raw = {fam: p * size for fam, p in mix.items()}
    counts = {fam: int(np.floor(v)) for fam, v in raw.items()}
    short = size - sum(counts.values())
    leftovers = sorted(raw, key=lambda f: (counts[f] - raw[f], f))
    for fam in leftovers[:short]:
        counts[fam] += 1
    return counts


class ScheduleShortfallError(ValueError):
    pass


def build_schedule(
    spec: ScheduleSpec, records_by_family: dict[str, list[FlowRecord]]
) -> list[Window]:
    """Draw windows per the spec's family mixes, each record used at most once.

    Per-family source order is shuffled once with the spec seed; records are
    then consumed sequentially, and each finished window is shuffled so
    families interleave.
    """
    rng = np.random.default_rng(spec.seed)
    queues: dict[str, list[FlowRecord]] = {}
    for fam in sorted(records_by_family):
        pool = list(records_by_family[fam])
        order = rng.permutation(len(pool))
        queues[fam] = [pool[i] for i in order]
    cursors = {fam: 0 for fam in queues}

    # fail early with a per-family accounting of demand vs supply
    demand: dict[str, int] = {}
    for rule in spec.rules:
        counts = _window_counts(rule.mix, spec.window_size)
        span = rule.end - rule.start + 1
        for fam, c in counts.items():
            demand[fam] = demand.get(fam, 0) + c * span
    for fam, need in sorted(demand.items()):
        have = len(queues.get(fam, []))
        if have < need:
            raise ScheduleShortfallError(
                f"family {fam!r}: schedule needs {need} records, only {have} available "
                f"(short by {need - have})"
            )

    windows: list[Window] = []
    for rule in spec.rules:
        counts = _window_counts(rule.mix, spec.window_size)
        for w in range(rule.start, rule.end + 1):
            records: list[FlowRecord] = []
            for fam in sorted(counts):
                c = counts[fam]
                records.extend(queues[fam][cursors[fam] : cursors[fam] + c])
                cursors[fam] += c
            order = rng.permutation(len(records))
            windows.append(Window(index=w, records=[records[i] for i in order]))
    return windows


def group_by_family(records: list[FlowRecord]) -> dict[str, list[FlowRecord]]:
    """Benign records land in the 'Normal' bucket; attacks under their family."""
    groups: dict[str, list[FlowRecord]] = {}
    for r in records:
        if r.truth is None:
            continue
        fam = r.truth.family if r.truth.family else NORMAL_FAMILY
        groups.setdefault(fam, []).append(r)
    return groups
