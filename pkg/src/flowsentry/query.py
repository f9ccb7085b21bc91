"""Hybrid query function: union of the top outlierness and top uncertainty
samples in a window, sent to the oracle for labeling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import Label, PoolEntry, Window


@dataclass(frozen=True)
class QuerySelection:
    """Index sets chosen for labeling, with the scores that justified them."""

    i1: tuple[int, ...]  # record ids, top outlierness
    i2: tuple[int, ...]  # record ids, top uncertainty
    union_ids: tuple[int, ...]
    outlier_score: dict[int, float]
    uncertainty: dict[int, float]
    budget: int
    capped: bool = False  # budget exceeded the eligible window portion

    def source(self, record_id: int) -> str:
        in1 = record_id in self.i1
        in2 = record_id in self.i2
        if in1 and in2:
            return "both"
        return "outlierness" if in1 else "uncertainty"


def _top_ids(ids: list[int], values: np.ndarray, m: int) -> tuple[int, ...]:
    # largest values first, ties broken by smaller record index (= window order)
    order = sorted(range(len(ids)), key=lambda i: (-values[i], i))
    return tuple(ids[i] for i in order[:m])


def select_queries(
    window: Window,
    scores: np.ndarray,
    uncertainties: np.ndarray,
    n: int,
    exclude: frozenset[int] = frozenset(),
) -> QuerySelection:
    """Pick ceil(n/2) ids by outlierness and floor(n/2) by uncertainty.

    The union keeps i1 members first (in window order), then i2-only members.
    Ids in `exclude` (already pooled) are ineligible. A budget covering the
    whole eligible window (n >= eligible count) selects everything, so a
    full-budget run labels the entire stream; a budget beyond that is flagged
    as capped.
    """
    if n < 1:
        raise ValueError("query budget must be >= 1")
    scores = np.asarray(scores, dtype=np.float64)
    uncertainties = np.asarray(uncertainties, dtype=np.float64)
    if len(scores) != window.size or len(uncertainties) != window.size:
        raise ValueError("scores and uncertainties must align with the window")

    eligible = [i for i, r in enumerate(window.records) if r.id not in exclude]
    ids = [window.records[i].id for i in eligible]
    os_vals = scores[eligible]
    u_vals = uncertainties[eligible]

    if n >= len(ids):
        n1 = n2 = len(ids)  # budget covers the window: label everything
    else:
        n1 = -(-n // 2)  # ceil: outlierness gets the odd slot
        n2 = n // 2
    capped = n > len(ids)
    i1 = _top_ids(ids, os_vals, n1)
    i2 = _top_ids(ids, u_vals, n2)

    pos = {rid: k for k, rid in enumerate(ids)}
    union = sorted(set(i1) | set(i2), key=lambda rid: (rid not in i1, pos[rid]))

    by_id_os = dict(zip(ids, os_vals.tolist()))
    by_id_u = dict(zip(ids, u_vals.tolist()))
    chosen = list(union)
    return QuerySelection(
        i1=i1,
        i2=i2,
        union_ids=tuple(chosen),
        outlier_score={rid: by_id_os[rid] for rid in chosen},
        uncertainty={rid: by_id_u[rid] for rid in chosen},
        budget=n,
        capped=capped,
    )


def resolve_queries(selection: QuerySelection, window: Window, oracle) -> list[PoolEntry]:
    """Ask the oracle for labels and shape them into pool entries."""
    if not selection.union_ids:
        raise ValueError("empty query selection")
    from .oracle import build_request  # local import to avoid a module cycle

    request = build_request(selection, window)
    response = oracle.resolve(request)
    by_id = {r.id: r for r in window.records}
    return [
        PoolEntry(record=by_id[rid], label=response.labels[rid], source_window=window.index)
        for rid in selection.union_ids
    ]
