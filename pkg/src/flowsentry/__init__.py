"""Incremental, active-learning intrusion detection over sliding windows.

A weighted feed-forward network detects known attacks, a kth-nearest-neighbor
outlier score flags candidate unknown ones, and a hybrid uncertainty/
outlierness query function grows the labeled pool through an oracle, with the
network retrained after every window.
"""

from .ingest import Scaler, apply_scaler, drop_incomplete, fit_scaler, parse_flow_csv
from .knn import KnnConfig, outlier_scores
from .metrics import ConfusionCounts, RocCurve, confusion, fpr, roc_auc, tpr
from .mlp import NetworkParams, Prediction, TrainConfig, forward, init_network, train, uncertainty
from .model import (
    FlowRecord,
    GroundTruth,
    Label,
    LabeledPool,
    PoolEntry,
    Window,
    pool_extend,
    validate_record,
)
from .oracle import InteractiveOracle, OracleRequest, OracleResponse, SimulatedOracle
from .pipeline import RunConfig, WindowReport, bootstrap, process_window, run_experiment
from .query import QuerySelection, resolve_queries, select_queries
from .schedule import ScheduleSpec, build_schedule
from .synth import SyntheticConfig, generate_stream

__version__ = "0.1.0"
