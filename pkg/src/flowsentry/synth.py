"""Synthetic 2-D traffic stream for desk-scale experiments and CI.

A benign Gaussian cluster plus attack cluster A from the first window; a
well-separated attack cluster B first appears midway through the stream,
emulating the arrival of an unseen attack family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FlowRecord, GroundTruth, Label, Window

BENIGN_CENTER = (0.0, 0.0)
ATTACK_A_CENTER = (5.0, 5.0)
ATTACK_B_CENTER = (-6.0, -6.0)


@dataclass(frozen=True)
class SyntheticConfig:
    n_windows: int = 12
    window_size: int = 500
    b_start_window: int = 6  # 1-based window where cluster B first appears
    test_size: int = 1000
    seed: int = 0


def _draw(
    rng: np.random.Generator,
    center: tuple[float, float],
    n: int,
    truth: GroundTruth | None,
    next_id: int,
) -> tuple[list[FlowRecord], int]:
    pts = rng.normal(loc=center, scale=1.0, size=(n, 2))
    records = [
        FlowRecord(id=next_id + i, features=pts[i], truth=truth) for i in range(n)
    ]
    return records, next_id + n


def generate_stream(
    config: SyntheticConfig = SyntheticConfig(),
) -> tuple[list[Window], list[FlowRecord], list[str]]:
    """Returns (windows, test records, feature names); fully deterministic."""
    rng = np.random.default_rng(config.seed)
    truth_a = GroundTruth(Label.ATTACK, family="alpha")
    truth_b = GroundTruth(Label.ATTACK, family="beta")
    benign = GroundTruth(Label.BENIGN)

    next_id = 0
    windows: list[Window] = []
    s = config.window_size
    for w in range(1, config.n_windows + 1):
        if w < config.b_start_window:
            counts = [(BENIGN_CENTER, benign, s - s // 5), (ATTACK_A_CENTER, truth_a, s // 5)]
        else:
            n_b = int(round(0.15 * s))
            n_a = s // 5
            counts = [
                (BENIGN_CENTER, benign, s - n_a - n_b),
                (ATTACK_A_CENTER, truth_a, n_a),
                (ATTACK_B_CENTER, truth_b, n_b),
            ]
        records: list[FlowRecord] = []
        for center, truth, n in counts:
            drawn, next_id = _draw(rng, center, n, truth, next_id)
            records.extend(drawn)
        order = rng.permutation(len(records))
        windows.append(Window(index=w, records=[records[i] for i in order]))

    n_b = int(round(0.2 * config.test_size))
    n_a = int(round(0.2 * config.test_size))
    test: list[FlowRecord] = []
    for center, truth, n in (
        (BENIGN_CENTER, benign, config.test_size - n_a - n_b),
        (ATTACK_A_CENTER, truth_a, n_a),
        (ATTACK_B_CENTER, truth_b, n_b),
    ):
        drawn, next_id = _draw(rng, center, n, truth, next_id)
        test.extend(drawn)
    order = rng.permutation(len(test))
    test = [test[i] for i in order]
    return windows, test, ["f0", "f1"]
