"""Command-line harness: prepare | run | serve | report."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import report as report_mod
from .ingest import drop_incomplete, parse_flow_csv, write_flow_csv
from .knn import KnnConfig
from .metrics import roc_auc, write_roc_csv
from .model import FlowRecord, Label, Window
from .mlp import TrainConfig, save_checkpoint
from .oracle import InteractiveOracle, ServiceState, SimulatedOracle, serve_labeling_api
from .pipeline import RunConfig, run_experiment
from .schedule import ScheduleSpec, build_schedule, group_by_family
from .synth import SyntheticConfig, generate_stream

DATA_ENV = "FLOWSENTRY_DATA"


def _data_dir(args) -> Path:
    if args.data is not None:
        return Path(args.data)
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    raise SystemExit(f"no data directory: pass --data or set {DATA_ENV}")


def _write_data_dir(
    out: Path, windows: list[Window], test: list[FlowRecord], feature_names: list[str], meta: dict
) -> None:
    wdir = out / "windows"
    wdir.mkdir(parents=True, exist_ok=True)
    for w in windows:
        write_flow_csv(wdir / f"window_{w.index:03d}.csv", w.records, feature_names)
    write_flow_csv(out / "test.csv", test, feature_names)
    meta = dict(meta, feature_names=feature_names, n_windows=len(windows))
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))


def load_data_dir(data: Path) -> tuple[list[Window], list[FlowRecord], list[str]]:
    meta = json.loads((data / "meta.json").read_text())
    feature_names = meta["feature_names"]
    next_id = 0
    windows = []
    for i, path in enumerate(sorted((data / "windows").glob("window_*.csv")), start=1):
        records, names = parse_flow_csv(path, start_id=next_id)
        if names != feature_names:
            raise SystemExit(f"{path}: feature columns differ from meta.json")
        next_id = records[-1].id + 1 if records else next_id
        windows.append(Window(index=i, records=records))
    test, _ = parse_flow_csv(data / "test.csv", start_id=next_id)
    return windows, test, feature_names


def cmd_prepare(args) -> int:
    out = Path(args.out)
    if args.synthetic:
        cfg = SyntheticConfig(seed=args.seed)
        windows, test, names = generate_stream(cfg)
        _write_data_dir(out, windows, test, names, {"source": "synthetic", "seed": args.seed})
        print(f"wrote {len(windows)} synthetic windows + test set to {out}")
        return 0

    if not args.csv:
        raise SystemExit("prepare needs --synthetic or --csv files with --schedule")
    records: list[FlowRecord] = []
    names = None
    dropped_total = 0
    next_id = 0
    for path in args.csv:
        parsed, file_names = parse_flow_csv(path, start_id=next_id)
        if names is None:
            names = file_names
        elif names != file_names:
            raise SystemExit(f"{path}: feature columns differ from the first file")
        clean, dropped = drop_incomplete(parsed)
        dropped_total += dropped
        records.extend(clean)
        next_id = parsed[-1].id + 1 if parsed else next_id

    spec = ScheduleSpec.from_json(args.schedule)
    rng = np.random.default_rng(spec.seed)
    groups = group_by_family(records)
    # hold out a test split per family before scheduling the rest
    test: list[FlowRecord] = []
    train_groups = {}
    for fam in sorted(groups):
        members = groups[fam]
        order = rng.permutation(len(members))
        n_test = int(round(args.test_fraction * len(members)))
        test.extend(members[i] for i in order[:n_test])
        train_groups[fam] = [members[i] for i in order[n_test:]]
    windows = build_schedule(spec, train_groups)
    _write_data_dir(
        out, windows, test, names,
        {"source": "csv", "schedule": str(args.schedule), "dropped_rows": dropped_total},
    )
    print(
        f"wrote {len(windows)} windows + test set ({len(test)} records) to {out}; "
        f"dropped {dropped_total} incomplete rows"
    )
    return 0


def _run_config(args) -> RunConfig:
    train = TrainConfig(
        seed=args.seed,
        max_epochs=args.max_epochs,
        patience=args.patience,
        weight_attack=args.attack_weight,
    )
    return RunConfig(
        window_size=args.window_size,
        budget=args.n,
        knn=KnnConfig(k=args.k),
        train=train,
        scaler_refit=args.scaler_refit,
        retrain=args.retrain,
    )


def _execute_run(args, interactive: bool) -> int:
    data = _data_dir(args)
    windows, test, feature_names = load_data_dir(data)
    if args.window_size == 0:
        args.window_size = windows[0].size
    config = _run_config(args)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.jsonl"

    service = None
    server = None
    if interactive:
        oracle = InteractiveOracle(timeout=args.label_timeout)
        service = ServiceState(oracle)
        server = serve_labeling_api(service, args.port, static_dir=args.static)
        print(f"labeling API on http://127.0.0.1:{args.port}")
    else:
        truth = {
            r.id: r.truth.label for w in windows for r in w.records if r.truth is not None
        }
        oracle = SimulatedOracle(truth)

    started = time.perf_counter()
    status = 0
    try:
        with report_path.open("w", encoding="utf-8") as fh:
            state, reports = run_experiment(
                windows,
                test,
                config,
                oracle,
                feature_names=feature_names,
                on_report=lambda r: (fh.write(r.to_json(args.timings) + "\n"), fh.flush()),
                service=service,
            )
            summary = {
                "kind": "summary",
                "windows": len(reports),
                "total_queried": sum(r.queried for r in reports),
                "final_pool_size": reports[-1].pool_size,
                "config": {
                    "window_size": config.window_size,
                    "budget": config.budget,
                    "k": config.knn.k,
                    "seed": config.train.seed,
                    "retrain": config.retrain,
                    "scaler_refit": config.scaler_refit,
                    "oracle": "interactive" if interactive else "simulated",
                },
            }
            if args.timings:
                summary["runtime_s"] = time.perf_counter() - started
            fh.write(json.dumps(summary, sort_keys=True) + "\n")
    except Exception as exc:  # partial report stays on disk
        print(f"run aborted: {exc}", file=sys.stderr)
        status = 1
    else:
        from .ingest import transform_matrix
        from . import mlp

        if test:
            X_test = np.stack([r.features for r in test])
            y_test = np.array(
                [1 if r.truth.label is Label.ATTACK else 0 for r in test], dtype=np.int64
            )
            scores = mlp.forward(state.params, transform_matrix(state.scaler, X_test))[:, 1]
            curve, _auc = roc_auc(scores, y_test)
            write_roc_csv(out / "roc_test.csv", curve)
        save_checkpoint(
            out / "model.npz", state.params, state.scaler.mu, state.scaler.sigma, config.train
        )
        print(f"report: {report_path}")
    finally:
        if server is not None:
            server.shutdown()
    return status


def cmd_run(args) -> int:
    return _execute_run(args, interactive=args.oracle == "interactive")


def cmd_serve(args) -> int:
    args.oracle = "interactive"
    return _execute_run(args, interactive=True)


def cmd_report(args) -> int:
    paths = report_mod.render(args.report, args.out)
    for p in paths:
        print(f"wrote {p}")
    return 0


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", default=None, help=f"data directory (or ${DATA_ENV})")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n", type=int, default=600, help="query budget per window")
    p.add_argument("--k", type=int, default=100, help="KNN neighbor count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-size", type=int, default=0, help="0 = infer from data")
    p.add_argument("--max-epochs", type=int, default=200)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--attack-weight", type=float, default=10.0)
    p.add_argument("--retrain", choices=["warm", "scratch"], default="warm")
    p.add_argument("--scaler-refit", choices=["pool", "frozen"], default="pool")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings in reports")
    p.add_argument("--port", type=int, default=8787, help="labeling API port (interactive)")
    p.add_argument("--static", default=None, help="static UI directory to serve")
    p.add_argument("--label-timeout", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowsentry",
        description="Incremental active-learning intrusion detection over sliding windows",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="build a windowed data directory")
    p.add_argument("--synthetic", action="store_true", help="generate the synthetic stream")
    p.add_argument("--csv", nargs="*", default=None, help="flow CSV input files")
    p.add_argument("--schedule", default=None, help="schedule spec JSON")
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("run", help="run the experiment")
    _add_run_flags(p)
    p.add_argument("--oracle", choices=["simulated", "interactive"], default="simulated")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="run with the interactive labeling API")
    _add_run_flags(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="render CSV and figures from a run report")
    p.add_argument("--report", required=True, help="JSON-lines run report")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
