"""Unsupervised detector: outlierness = Euclidean distance to the kth nearest
neighbor within the window (self excluded)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_K = 100


@dataclass(frozen=True)
class KnnConfig:
    k: int = DEFAULT_K

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


def outlier_scores(X: np.ndarray, config: KnnConfig, chunk: int = 64) -> np.ndarray:
    """kth-nearest-neighbor distance for every row of X.

    Brute-force over all pairs, row-chunked to bound memory. The chunked
    arithmetic is identical to a per-point sweep, so results agree exactly
    with an O(s^2) oracle.
    """
    X = np.asarray(X, dtype=np.float64)
    s = X.shape[0]
    if s < config.k + 1:
        raise ValueError(
            f"window of {s} records is too small for k={config.k}; need at least {config.k + 1}"
        )
    scores = np.empty(s)
    for lo in range(0, s, chunk):
        hi = min(lo + chunk, s)
        diffs = X[lo:hi, None, :] - X[None, :, :]
        dists = np.sqrt((diffs**2).sum(axis=-1))
        for i in range(lo, hi):
            dists[i - lo, i] = np.inf  # self excluded
        # kth smallest (1-indexed) among the remaining s-1 distances
        scores[lo:hi] = np.partition(dists, config.k - 1, axis=1)[:, config.k - 1]
    return scores
