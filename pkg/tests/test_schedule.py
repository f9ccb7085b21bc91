from pathlib import Path

import numpy as np
import pytest

from flowsentry.model import FlowRecord, GroundTruth, Label
from flowsentry.schedule import (
    ScheduleRule,
    ScheduleShortfallError,
    ScheduleSpec,
    build_schedule,
    group_by_family,
)

SCHEDULES = Path(__file__).resolve().parents[1] / "schedules"


def _family_records(counts, start_id=0):
    groups = {}
    next_id = start_id
    for fam, n in counts.items():
        records = []
        for _ in range(n):
            if fam == "Normal":
                truth = GroundTruth(Label.BENIGN)
            else:
                truth = GroundTruth(Label.ATTACK, family=fam)
            records.append(FlowRecord(id=next_id, features=np.array([float(next_id)]), truth=truth))
            next_id += 1
        groups[fam] = records
    return groups


def _spec(rules, windows=4, size=10, seed=0):
    return ScheduleSpec(total_windows=windows, window_size=size, seed=seed, rules=tuple(rules))


class TestSpecValidation:
    def test_gap_rejected(self):
        with pytest.raises(ValueError, match="cover"):
            _spec([ScheduleRule(1, 2, {"Normal": 1.0})], windows=4)

    def test_overlap_rejected(self):
        with pytest.raises(ValueError, match="cover"):
            _spec([ScheduleRule(1, 3, {"Normal": 1.0}), ScheduleRule(3, 4, {"Normal": 1.0})])

    def test_proportions_must_sum_to_one(self):
        with pytest.raises(ValueError, match="proportions"):
            _spec([ScheduleRule(1, 4, {"Normal": 0.9})])

    def test_shipped_table1_spec_loads(self):
        spec = ScheduleSpec.from_json(SCHEDULES / "cicids2017_table1.json")
        assert spec.total_windows == 60
        assert spec.window_size == 5000
        # the port-scan block starts at window 16, as in the published schedule
        rule = next(r for r in spec.rules if r.start == 16)
        assert "PortScan" in rule.mix and "DoS GoldenEye" not in rule.mix


class TestBuildSchedule:
    def test_family_composition_per_rule(self):
        spec = _spec(
            [
                ScheduleRule(1, 2, {"Normal": 0.8, "alpha": 0.2}),
                ScheduleRule(3, 4, {"Normal": 0.6, "alpha": 0.2, "beta": 0.2}),
            ]
        )
        groups = _family_records({"Normal": 60, "alpha": 20, "beta": 10})
        windows = build_schedule(spec, groups)
        assert [w.index for w in windows] == [1, 2, 3, 4]
        for w in windows[:2]:
            fams = {r.truth.family for r in w.records if r.truth.family}
            assert fams == {"alpha"}
            assert sum(r.truth.label is Label.ATTACK for r in w.records) == 2
        for w in windows[2:]:
            fams = {r.truth.family for r in w.records if r.truth.family}
            assert fams == {"alpha", "beta"}

    def test_records_used_at_most_once(self):
        spec = _spec([ScheduleRule(1, 4, {"Normal": 1.0})])
        groups = _family_records({"Normal": 40})
        windows = build_schedule(spec, groups)
        ids = [r.id for w in windows for r in w.records]
        assert len(ids) == len(set(ids)) == 40

    def test_deterministic_for_seed(self):
        spec = _spec([ScheduleRule(1, 4, {"Normal": 0.7, "alpha": 0.3})], seed=5)
        groups = _family_records({"Normal": 40, "alpha": 15})
        a = build_schedule(spec, groups)
        b = build_schedule(spec, groups)
        assert [[r.id for r in w.records] for w in a] == [[r.id for r in w.records] for w in b]

    def test_homogeneous_single_family(self):
        spec = _spec([ScheduleRule(1, 4, {"Normal": 1.0})])
        windows = build_schedule(spec, _family_records({"Normal": 40}))
        assert all(r.truth.label is Label.BENIGN for w in windows for r in w.records)

    def test_shortfall_names_family_and_gap(self):
        spec = _spec([ScheduleRule(1, 4, {"Normal": 0.5, "rare": 0.5})])
        groups = _family_records({"Normal": 100, "rare": 8})
        with pytest.raises(ScheduleShortfallError, match="rare") as err:
            build_schedule(spec, groups)
        assert "short by 12" in str(err.value)  # needs 20, has 8

    def test_largest_remainder_hits_window_size(self):
        spec = _spec([ScheduleRule(1, 1, {"Normal": 0.66, "alpha": 0.34})], windows=1, size=7)
        groups = _family_records({"Normal": 10, "alpha": 10})
        (w,) = build_schedule(spec, groups)
        assert w.size == 7


class TestGroupByFamily:
    def test_benign_goes_to_normal(self):
        groups = _family_records({"Normal": 3, "Hulk": 2})
        records = [r for members in groups.values() for r in members]
        regrouped = group_by_family(records)
        assert len(regrouped["Normal"]) == 3
        assert len(regrouped["Hulk"]) == 2

    def test_unlabeled_skipped(self):
        records = [FlowRecord(id=0, features=np.zeros(1))]
        assert group_by_family(records) == {}
