"""Run-report rendering: JSON-lines -> per-window CSV plus figure files
(test-set AUC timeline and per-window AUC with new-family markers)."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load_report(path: str | Path) -> tuple[list[dict], dict | None]:
    """Split a JSON-lines run report into window entries and the summary."""
    windows: list[dict] = []
    summary = None
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        entry = json.loads(line)
        if entry.get("kind") == "summary":
            summary = entry
        else:
            windows.append(entry)
    return windows, summary


def write_windows_csv(path: str | Path, windows: list[dict]) -> None:
    fields = ["window", "auc_window", "auc_test", "queried", "pool_size", "epochs", "new_families"]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for w in windows:
            row = [w.get(f) for f in fields[:-1]]
            row.append(";".join(w.get("new_families", [])))
            writer.writerow(row)


def plot_test_auc(path: str | Path, windows: list[dict], label: str | None = None) -> None:
    """Test-set AUC over windows: cumulative-learning view."""
    xs = [w["window"] for w in windows if w.get("auc_test") is not None]
    ys = [w["auc_test"] for w in windows if w.get("auc_test") is not None]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, ys, marker="o", ms=3, label=label or "test AUC")
    ax.set_xlabel("window")
    ax.set_ylabel("AUC (test set)")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_window_auc(path: str | Path, windows: list[dict]) -> None:
    """Per-window AUC with markers where unseen attack families arrive."""
    pts = [(w["window"], w["auc_window"]) for w in windows if w.get("auc_window") is not None]
    fig, ax = plt.subplots(figsize=(7, 4))
    if pts:
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker="o", ms=3, color="tab:green", label="window AUC")
    marked = False
    for w in windows:
        if w.get("new_families") and w.get("auc_window") is not None:
            ax.plot(
                w["window"], w["auc_window"], "o", ms=8, mfc="none", color="tab:blue",
                label=None if marked else "new attack family",
            )
            marked = True
    ax.set_xlabel("window")
    ax.set_ylabel("AUC (window)")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render(report_path: str | Path, out_dir: str | Path) -> list[Path]:
    """Render all artifacts for one run report; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    windows, _ = load_report(report_path)
    paths = [out / "windows.csv", out / "test_auc.png", out / "window_auc.png"]
    write_windows_csv(paths[0], windows)
    plot_test_auc(paths[1], windows)
    plot_window_auc(paths[2], windows)
    return paths
