"""Control loop: bootstrap on the fully labeled first window, then per window
standardize -> predict -> outlier-score -> query -> label -> pool -> retrain
-> evaluate."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import mlp
from .ingest import Scaler, fit_scaler_matrix, transform_matrix
from .knn import KnnConfig, outlier_scores
from .metrics import roc_auc
from .model import Label, LabeledPool, PoolEntry, Window, pool_extend
from .mlp import NetworkParams, TrainConfig
from .oracle import Oracle, ServiceState, build_request
from .query import QuerySelection, select_queries


@dataclass
class RunConfig:
    window_size: int = 5000
    budget: int = 600
    knn: KnnConfig = field(default_factory=KnnConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    scaler_refit: str = "pool"  # pool | frozen (keep the first-window scaler)
    retrain: str = "warm"  # warm | scratch

    def __post_init__(self):
        if self.window_size < self.knn.k + 1:
            raise ValueError("window size must exceed the KNN neighbor count")
        if self.budget < 1:
            raise ValueError("query budget must be >= 1")
        if self.scaler_refit not in ("pool", "frozen"):
            raise ValueError("scaler_refit must be 'pool' or 'frozen'")
        if self.retrain not in ("warm", "scratch"):
            raise ValueError("retrain must be 'warm' or 'scratch'")


@dataclass
class WindowReport:
    window: int
    auc_window: float | None  # None when the window holds a single class
    auc_test: float | None
    queried: int
    pool_size: int
    epochs: int
    new_families: list[str]
    flags: list[str] = field(default_factory=list)
    durations: dict[str, float] = field(default_factory=dict)

    def to_json(self, include_timings: bool = False) -> str:
        payload = {
            "window": self.window,
            "auc_window": self.auc_window,
            "auc_test": self.auc_test,
            "queried": self.queried,
            "pool_size": self.pool_size,
            "epochs": self.epochs,
            "new_families": self.new_families,
            "flags": self.flags,
        }
        if include_timings:
            payload["durations"] = self.durations
        return json.dumps(payload, sort_keys=True)


@dataclass
class EngineState:
    params: NetworkParams
    scaler: Scaler
    pool: LabeledPool
    feature_names: list[str]
    seen_families: set[str]
    last_window: int


def _pool_arrays(pool: LabeledPool, scaler: Scaler) -> tuple[np.ndarray, np.ndarray]:
    return transform_matrix(scaler, pool.feature_matrix()), pool.label_vector()


def _window_truth_vector(window: Window) -> np.ndarray | None:
    if any(r.truth is None for r in window.records):
        return None
    return np.array(
        [1 if r.truth.label is Label.ATTACK else 0 for r in window.records], dtype=np.int64
    )


def _safe_auc(scores: np.ndarray, truths: np.ndarray | None) -> float | None:
    if truths is None or len(np.unique(truths)) < 2:
        return None
    return roc_auc(scores, truths)[1]


def bootstrap(sw1: Window, config: RunConfig) -> tuple[EngineState, WindowReport]:
    """Fit the scaler on the first window, train from scratch, seed the pool."""
    unlabeled = [r.id for r in sw1.records if r.truth is None]
    if unlabeled:
        raise ValueError(f"first window must be fully labeled; missing ids {unlabeled[:5]}")
    t0 = time.perf_counter()
    scaler = fit_scaler_matrix(sw1.feature_matrix())
    pool = LabeledPool()
    pool_extend(
        pool,
        [PoolEntry(record=r, label=r.truth.label, source_window=sw1.index) for r in sw1.records],
    )
    X, y = _pool_arrays(pool, scaler)
    params, train_report = mlp.train((X, y), None, config.train)
    families = {
        r.truth.family for r in sw1.records if r.truth is not None and r.truth.family
    }
    state = EngineState(
        params=params,
        scaler=scaler,
        pool=pool,
        feature_names=[f"f{j}" for j in range(sw1.records[0].features.shape[0])],
        seen_families=families,
        last_window=sw1.index,
    )
    flags = []
    if train_report["degenerate"]:
        flags.append(f"degenerate: {train_report['degenerate']}")
    report = WindowReport(
        window=sw1.index,
        auc_window=None,
        auc_test=None,
        queried=len(sw1.records),
        pool_size=len(pool),
        epochs=train_report["epochs"],
        new_families=sorted(families),
        flags=flags,
        durations={"total": time.perf_counter() - t0},
    )
    return state, report


def process_window(
    state: EngineState,
    window: Window,
    oracle: Oracle,
    config: RunConfig,
    test_data: tuple[np.ndarray, np.ndarray] | None = None,
    service: ServiceState | None = None,
) -> tuple[EngineState, WindowReport]:
    """One sliding-window round. Window AUC uses the pre-retraining model;
    test AUC uses the newly retrained one. Atomic: state is untouched on error.
    """
    if window.index <= state.last_window:
        raise ValueError(
            f"window index {window.index} must exceed previous {state.last_window}"
        )
    durations: dict[str, float] = {}
    t0 = time.perf_counter()

    # (1) standardize with the scaler from the previous round
    X_raw = window.feature_matrix()
    X = transform_matrix(state.scaler, X_raw)
    durations["standardize"] = time.perf_counter() - t0

    # (2) detect with the current model
    t = time.perf_counter()
    probs = mlp.forward(state.params, X)
    p_attack = probs[:, 1]
    u = mlp.uncertainty(probs)
    durations["predict"] = time.perf_counter() - t

    # (3) outlierness within the window
    t = time.perf_counter()
    os_scores = outlier_scores(X, config.knn)
    durations["knn"] = time.perf_counter() - t

    # (4) query selection
    t = time.perf_counter()
    selection = select_queries(window, os_scores, u, config.budget, exclude=state.pool.ids)
    durations["select"] = time.perf_counter() - t

    # (5) oracle labeling (the only blocking stage)
    t = time.perf_counter()
    if service is not None:
        service.set_status("awaiting_labels", window.index)
    request = build_request(selection, window, state.feature_names)
    response = oracle.resolve(request)
    by_id = {r.id: r for r in window.records}
    entries = [
        PoolEntry(record=by_id[rid], label=response.labels[rid], source_window=window.index)
        for rid in selection.union_ids
    ]
    durations["label"] = time.perf_counter() - t

    # (6) grow the pool (on a copy, for atomicity)
    if service is not None:
        service.set_status("training", window.index)
    pool = pool_extend(state.pool.copy(), entries)

    # (7) scaler refit per policy
    t = time.perf_counter()
    if config.scaler_refit == "pool":
        scaler = fit_scaler_matrix(pool.feature_matrix())
    else:
        scaler = state.scaler

    # (8) retrain on the full pool
    X_pool, y_pool = _pool_arrays(pool, scaler)
    start = state.params if config.retrain == "warm" else None
    params, train_report = mlp.train((X_pool, y_pool), start, config.train)
    durations["retrain"] = time.perf_counter() - t

    # (9) evaluate
    t = time.perf_counter()
    truths = _window_truth_vector(window)
    auc_window = _safe_auc(p_attack, truths)
    auc_test = None
    if test_data is not None:
        X_test, y_test = test_data
        test_scores = mlp.forward(params, transform_matrix(scaler, X_test))[:, 1]
        auc_test = _safe_auc(test_scores, y_test)
    durations["evaluate"] = time.perf_counter() - t
    durations["total"] = time.perf_counter() - t0

    families = {
        r.truth.family for r in window.records if r.truth is not None and r.truth.family
    }
    new_families = sorted(families - state.seen_families)
    flags = []
    if selection.capped:
        flags.append("budget capped at window size")
    if auc_window is None:
        flags.append("window AUC undefined: single truth class")
    if train_report["degenerate"]:
        flags.append(f"degenerate: {train_report['degenerate']}")

    new_state = EngineState(
        params=params,
        scaler=scaler,
        pool=pool,
        feature_names=state.feature_names,
        seen_families=state.seen_families | families,
        last_window=window.index,
    )
    report = WindowReport(
        window=window.index,
        auc_window=auc_window,
        auc_test=auc_test,
        queried=len(selection.union_ids),
        pool_size=len(pool),
        epochs=train_report["epochs"],
        new_families=new_families,
        flags=flags,
        durations=durations,
    )
    return new_state, report


def run_experiment(
    windows: list[Window],
    test_records,
    config: RunConfig,
    oracle: Oracle,
    feature_names: list[str] | None = None,
    on_report: Callable[[WindowReport], None] | None = None,
    service: ServiceState | None = None,
) -> tuple[EngineState, list[WindowReport]]:
    """Bootstrap on the first window, then process the rest in order.

    Test records never reach the pool: id-disjointness is checked up front.
    Reports are handed to `on_report` as they complete, so a partial sequence
    survives an aborted run.
    """
    if not windows:
        raise ValueError("at least one window required")
    test_X = test_y = None
    if test_records:
        stream_ids = {r.id for w in windows for r in w.records}
        test_ids = {r.id for r in test_records}
        overlap = stream_ids & test_ids
        if overlap:
            raise ValueError(f"test set leaks into the stream: ids {sorted(overlap)[:5]}")
        test_X = np.stack([r.features for r in test_records])
        test_y = np.array(
            [1 if r.truth.label is Label.ATTACK else 0 for r in test_records], dtype=np.int64
        )

    reports: list[WindowReport] = []

    def emit(state: EngineState, report: WindowReport) -> None:
        reports.append(report)
        if on_report is not None:
            on_report(report)
        if service is not None:
            service.add_window_metrics(
                {
                    "window": report.window,
                    "auc": report.auc_window,
                    "queried": report.queried,
                    "pool_size": report.pool_size,
                    "new_families": report.new_families,
                }
            )

    state, report = bootstrap(windows[0], config)
    if feature_names is not None:
        state.feature_names = list(feature_names)
    if test_X is not None:
        scores = mlp.forward(state.params, transform_matrix(state.scaler, test_X))[:, 1]
        report.auc_test = _safe_auc(scores, test_y)
    emit(state, report)

    test_data = None if test_X is None else (test_X, test_y)
    for window in windows[1:]:
        state, report = process_window(state, window, oracle, config, test_data, service)
        emit(state, report)
    if service is not None:
        service.set_status("done", state.last_window)
    return state, reports
