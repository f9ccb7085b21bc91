"""Weighted feed-forward detector: dense ReLU stack with a 2-way softmax head,
trained with class-weighted cross-entropy, Adam, and early stopping."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import LabeledPool

DEFAULT_HIDDEN = (256, 128, 64, 32)
LOG_CLAMP = 1e-12


@dataclass
class TrainConfig:
    batch_size: int = 32
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_benign: float = 1.0
    weight_attack: float = 10.0
    max_epochs: int = 200
    patience: int = 5
    validation_fraction: float = 0.1
    seed: int = 0
    hidden: tuple[int, ...] = DEFAULT_HIDDEN

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1/beta2 must be in [0, 1)")
        if self.weight_benign <= 0 or self.weight_attack <= 0:
            raise ValueError("class weights must be positive")
        if not (0 < self.validation_fraction < 1):
            raise ValueError("validation_fraction must be in (0, 1)")

    @property
    def class_weights(self) -> np.ndarray:
        return np.array([self.weight_benign, self.weight_attack])


@dataclass
class NetworkParams:
    """Dense layer weights/biases, input -> hidden stack -> 2 output logits."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    def copy(self) -> "NetworkParams":
        return NetworkParams(
            [w.copy() for w in self.weights], [b.copy() for b in self.biases]
        )

    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]


@dataclass
class AdamState:
    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, params: NetworkParams) -> "AdamState":
        return cls(
            m_w=[np.zeros_like(w) for w in params.weights],
            v_w=[np.zeros_like(w) for w in params.weights],
            m_b=[np.zeros_like(b) for b in params.biases],
            v_b=[np.zeros_like(b) for b in params.biases],
        )


@dataclass(frozen=True)
class Prediction:
    p_benign: float
    p_attack: float


def init_network(
    input_dim: int, seed: int, hidden: tuple[int, ...] = DEFAULT_HIDDEN
) -> NetworkParams:
    """He-uniform weights (bound sqrt(6/fan_in)), zero biases; seed-deterministic."""
    if input_dim < 1:
        raise ValueError("input_dim must be >= 1")
    rng = np.random.default_rng(seed)
    sizes = [input_dim, *hidden, 2]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return NetworkParams(weights, biases)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=1, keepdims=True)


def _forward_pass(params: NetworkParams, X: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Returns (probs, post-activation values per layer, inputs first)."""
    acts = [X]
    a = X
    n_layers = len(params.weights)
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W + b
        a = z if i == n_layers - 1 else np.maximum(z, 0.0)
        acts.append(a)
    if not np.all(np.isfinite(a)):
        raise FloatingPointError("non-finite activations: corrupted parameters")
    return _softmax(a), acts


def forward(params: NetworkParams, X: np.ndarray) -> np.ndarray:
    """Class probabilities, shape (n, 2); column 1 is the attack probability."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != params.input_dim:
        raise ValueError(f"expected {params.input_dim} features, got {X.shape[1]}")
    probs, _ = _forward_pass(params, X)
    return probs


def predict(params: NetworkParams, features: np.ndarray) -> Prediction:
    p = forward(params, features)[0]
    return Prediction(p_benign=float(p[0]), p_attack=float(p[1]))


def uncertainty(probs: np.ndarray) -> np.ndarray:
    """1 - probability of the most likely class; in [0, 0.5] for binary output."""
    probs = np.atleast_2d(probs)
    return 1.0 - probs.max(axis=1)


def weighted_loss(probs: np.ndarray, labels: np.ndarray, class_weights: np.ndarray) -> float:
    """Mean over the batch of w(label) * (-log p(label)), log clamped at 1e-12."""
    if len(probs) != len(labels):
        raise ValueError("batch length mismatch")
    p_true = probs[np.arange(len(labels)), labels]
    w = class_weights[labels]
    return float(np.mean(-w * np.log(np.maximum(p_true, LOG_CLAMP))))


def gradients(
    params: NetworkParams,
    X: np.ndarray,
    labels: np.ndarray,
    class_weights: np.ndarray,
) -> tuple[list[np.ndarray], list[np.ndarray], float]:
    """Analytic gradient of the weighted loss; returns (dW, db, loss)."""
    if len(X) == 0:
        raise ValueError("empty batch")
    probs, acts = _forward_pass(params, X)
    loss = weighted_loss(probs, labels, class_weights)
    n = len(X)
    w = class_weights[labels]

    onehot = np.zeros_like(probs)
    onehot[np.arange(n), labels] = 1.0
    delta = (probs - onehot) * (w / n)[:, None]

    dW = [np.empty(0)] * len(params.weights)
    db = [np.empty(0)] * len(params.biases)
    for i in range(len(params.weights) - 1, -1, -1):
        dW[i] = acts[i].T @ delta
        db[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params.weights[i].T) * (acts[i] > 0)
    return dW, db, loss


def adam_step(
    params: NetworkParams,
    grads: tuple[list[np.ndarray], list[np.ndarray]],
    state: AdamState,
    config: TrainConfig,
) -> tuple[NetworkParams, AdamState]:
    """Bias-corrected Adam update; returns fresh params and state."""
    dW, db = grads
    t = state.t + 1
    lr, b1, b2, eps = config.learning_rate, config.beta1, config.beta2, config.epsilon
    new = params.copy()
    ns = AdamState(
        m_w=list(state.m_w), v_w=list(state.v_w),
        m_b=list(state.m_b), v_b=list(state.v_b), t=t,
    )
    for i in range(len(new.weights)):
        for grad, target, m_list, v_list in (
            (dW[i], new.weights, ns.m_w, ns.v_w),
            (db[i], new.biases, ns.m_b, ns.v_b),
        ):
            m = b1 * m_list[i] + (1 - b1) * grad
            v = b2 * v_list[i] + (1 - b2) * grad**2
            m_hat = m / (1 - b1**t)
            v_hat = v / (1 - b2**t)
            target[i] = target[i] - lr * m_hat / (np.sqrt(v_hat) + eps)
            m_list[i], v_list[i] = m, v
    return new, ns


def _stratified_split(
    labels: np.ndarray, fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class holdout of roughly `fraction`; guarantees >= 1 training sample."""
    val_idx = []
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        members = rng.permutation(members)
        n_val = int(np.floor(fraction * len(members)))
        val_idx.extend(members[:n_val].tolist())
    val = np.array(sorted(val_idx), dtype=np.int64)
    mask = np.ones(len(labels), dtype=bool)
    mask[val] = False
    train = np.flatnonzero(mask)
    if len(train) == 0:
        raise ValueError("validation split leaves no training samples")
    return train, val


def train(
    pool: LabeledPool | tuple[np.ndarray, np.ndarray],
    start: NetworkParams | None,
    config: TrainConfig,
) -> tuple[NetworkParams, dict]:
    """Mini-batch Adam with early stopping on validation weighted loss.

    Accepts either a LabeledPool or a pre-standardized (X, y) pair. Shuffling,
    splitting, and initialization all derive from config.seed, so the result is
    a pure function of (pool, start, config). Returns the parameters of the
    best validation epoch plus a training report.
    """
    if isinstance(pool, LabeledPool):
        X, y = pool.feature_matrix(), pool.label_vector()
    else:
        X, y = pool
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(X) < 2:
        raise ValueError("training requires at least 2 samples")

    degenerate = len(np.unique(y)) < 2
    rng = np.random.default_rng(config.seed)
    params = start.copy() if start is not None else init_network(
        X.shape[1], seed=config.seed, hidden=config.hidden
    )
    state = AdamState.zeros_like(params)
    cw = config.class_weights

    train_idx, val_idx = _stratified_split(y, config.validation_fraction, rng)
    if len(val_idx) == 0:
        # Pool too small for a holdout; monitor training loss instead.
        val_idx = train_idx
    X_tr, y_tr = X[train_idx], y[train_idx]
    X_val, y_val = X[val_idx], y[val_idx]

    best_params = params.copy()
    best_val = weighted_loss(forward(params, X_val), y_val, cw)
    bad_epochs = 0
    epochs_run = 0
    for _ in range(config.max_epochs):
        order = rng.permutation(len(X_tr))
        for lo in range(0, len(order), config.batch_size):
            batch = order[lo : lo + config.batch_size]
            dW, db, _ = gradients(params, X_tr[batch], y_tr[batch], cw)
            params, state = adam_step(params, (dW, db), state, config)
        epochs_run += 1
        val_loss = weighted_loss(forward(params, X_val), y_val, cw)
        if val_loss < best_val:
            best_val = val_loss
            best_params = params.copy()
            bad_epochs = 0
        else:
            bad_epochs += 1
            # patience = number of consecutive non-improving epochs tolerated;
            # patience=0 still allows the first non-improving epoch to trigger.
            if bad_epochs >= max(config.patience, 1):
                break

    report = {
        "epochs": epochs_run,
        "best_val_loss": best_val,
        "train_samples": int(len(X_tr)),
        "val_samples": int(len(X_val)),
        "degenerate": "one class" if degenerate else None,
        "warm_start": start is not None,
    }
    return best_params, report


def save_checkpoint(
    path: str | Path,
    params: NetworkParams,
    scaler_mu: np.ndarray | None = None,
    scaler_sigma: np.ndarray | None = None,
    config: TrainConfig | None = None,
) -> None:
    """Bit-exact .npz checkpoint of weights, biases, and scaler statistics."""
    arrays: dict[str, np.ndarray] = {}
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    if scaler_mu is not None:
        arrays["scaler_mu"] = scaler_mu
        arrays["scaler_sigma"] = scaler_sigma
    meta = {
        "format": "flowsentry-checkpoint-v1",
        "n_layers": len(params.weights),
        "layer_sizes": params.layer_sizes(),
        "config": None if config is None else vars(config) | {"hidden": list(config.hidden)},
    }
    arrays["meta"] = np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)
    np.savez(path, **arrays)


def load_checkpoint(path: str | Path):
    """Returns (params, scaler_mu, scaler_sigma, meta dict)."""
    data = np.load(path)
    meta = json.loads(bytes(data["meta"]).decode())
    if meta.get("format") != "flowsentry-checkpoint-v1":
        raise ValueError(f"{path}: unrecognized checkpoint format")
    n = meta["n_layers"]
    params = NetworkParams(
        weights=[data[f"w{i}"] for i in range(n)],
        biases=[data[f"b{i}"] for i in range(n)],
    )
    mu = data["scaler_mu"] if "scaler_mu" in data else None
    sigma = data["scaler_sigma"] if "scaler_sigma" in data else None
    return params, mu, sigma, meta
