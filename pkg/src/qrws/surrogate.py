"""Dense feed-forward surrogate for the success probability.

Inputs are raw radians (and the coin qubit count for the combined model); the
model rescales them internally to roughly ``[0, 1]``.  Hidden layers use SELU,
the single output a logistic sigmoid.  Training minimizes mean squared error
with Adam and keeps the epoch with the lowest validation loss.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "SELU_LAMBDA",
    "SELU_ALPHA",
    "MlpModel",
    "TrainConfig",
    "TrainReport",
    "ModelFormatError",
    "init_model",
    "parameter_count",
    "forward",
    "loss_and_grad",
    "train",
    "train_arrays",
    "grid_search",
    "save_model",
    "load_model",
    "predict_p",
    "save_history_csv",
    "save_grid_csv",
    "dataset_arrays",
]

log = logging.getLogger(__name__)

SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772
FORMAT_NAME = "qrws-mlp"
FORMAT_VERSION = 1
_TWO_PI = 2.0 * math.pi


class ModelFormatError(ValueError):
    pass


def _input_scale(input_dim: int) -> np.ndarray:
    scale = [1.0 / _TWO_PI, 1.0 / _TWO_PI, 1.0 / 8.0]
    return np.array(scale[:input_dim])


@dataclass(eq=False)
class MlpModel:
    input_dim: int
    layers: int
    neurons: int
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    meta: dict = field(default_factory=dict)

    @property
    def input_scale(self) -> np.ndarray:
        return _input_scale(self.input_dim)

    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def copy(self) -> "MlpModel":
        return MlpModel(
            self.input_dim, self.layers, self.neurons,
            [w.copy() for w in self.weights], [b.copy() for b in self.biases], dict(self.meta),
        )


@dataclass
class TrainConfig:
    epochs: int = 200
    batch_size: int = 256
    learning_rate: float = 1e-3
    patience: int = 50
    train_fraction: float = 0.8
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class TrainReport:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = -1

    @property
    def best_val_loss(self) -> float:
        return self.val_loss[self.best_epoch]


def _layer_shapes(input_dim: int, layers: int, neurons: int) -> list[tuple[int, int]]:
    dims = [input_dim] + [neurons] * layers + [1]
    return list(zip(dims[:-1], dims[1:]))


def parameter_count(input_dim: int, layers: int, neurons: int) -> int:
    return sum(i * o + o for i, o in _layer_shapes(input_dim, layers, neurons))


def init_model(input_dim: int, layers: int, neurons: int, seed: int = 0) -> MlpModel:
    """LeCun-normal weights (variance ``1/fan_in``) and zero biases."""
    if input_dim not in (2, 3):
        raise ValueError(f"input_dim must be 2 or 3, got {input_dim}")
    if layers < 1 or neurons < 1:
        raise ValueError("layers and neurons must be >= 1")
    rng = np.random.default_rng(seed)
    ws, bs = [], []
    for fan_in, fan_out in _layer_shapes(input_dim, layers, neurons):
        ws.append(rng.normal(0.0, 1.0 / math.sqrt(fan_in), size=(fan_in, fan_out)))
        bs.append(np.zeros(fan_out))
    return MlpModel(input_dim, layers, neurons, ws, bs, {"seed": seed})


def _selu(z: np.ndarray) -> np.ndarray:
    return SELU_LAMBDA * np.where(z > 0.0, z, SELU_ALPHA * np.expm1(np.minimum(z, 0.0)))


def _selu_grad(z: np.ndarray) -> np.ndarray:
    return SELU_LAMBDA * np.where(z > 0.0, 1.0, SELU_ALPHA * np.exp(np.minimum(z, 0.0)))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _forward_scaled(model: MlpModel, x: np.ndarray, keep: bool = False):
    pre = []
    act = [x]
    h = x
    last = len(model.weights) - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        if keep:
            pre.append(z)
        h = _sigmoid(z) if l == last else _selu(z)
        if keep and l != last:
            act.append(h)
    return h[:, 0], pre, act


def forward(model: MlpModel, x) -> np.ndarray | float:
    """Predict from raw inputs; ``x`` is one input vector or a ``(B, input_dim)`` batch."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != model.input_dim:
        raise ValueError(f"expected {model.input_dim} inputs, got {arr.shape[1]}")
    y, _, _ = _forward_scaled(model, arr * model.input_scale)
    return float(y[0]) if single else y


def _loss_and_grad_scaled(model: MlpModel, xs: np.ndarray, t: np.ndarray):
    y, pre, act = _forward_scaled(model, xs, keep=True)
    diff = y - t
    loss = float(np.mean(diff * diff))
    # dL/dz at the sigmoid output
    delta = (2.0 / len(t)) * diff * y * (1.0 - y)
    delta = delta[:, None]
    gw = [None] * len(model.weights)
    gb = [None] * len(model.weights)
    for l in range(len(model.weights) - 1, -1, -1):
        gw[l] = act[l].T @ delta
        gb[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l].T) * _selu_grad(pre[l - 1])
    return loss, gw, gb


def loss_and_grad(model: MlpModel, x, target):
    """Mean squared error on raw inputs and its gradients w.r.t. weights and biases."""
    xs = np.atleast_2d(np.asarray(x, dtype=float)) * model.input_scale
    return _loss_and_grad_scaled(model, xs, np.asarray(target, dtype=float).ravel())


def _mse(model: MlpModel, xs: np.ndarray, t: np.ndarray, batch: int = 65536) -> float:
    total = 0.0
    for lo in range(0, len(t), batch):
        y, _, _ = _forward_scaled(model, xs[lo : lo + batch])
        total += float(np.sum((y - t[lo : lo + batch]) ** 2))
    return total / len(t)


def dataset_arrays(dataset, input_dim: int) -> tuple[np.ndarray, np.ndarray]:
    phi, zeta, n, p = dataset.arrays()
    cols = [phi, zeta] if input_dim == 2 else [phi, zeta, n]
    return np.column_stack(cols), p


def train(dataset, input_dim: int, layers: int, neurons: int, config: Optional[TrainConfig] = None):
    """Fit a surrogate to a :class:`~qrws.sweep.Dataset`; returns ``(model, report)``."""
    x, y = dataset_arrays(dataset, input_dim)
    model, report = train_arrays(x, y, input_dim, layers, neurons, config)
    if getattr(dataset, "n", None) is not None:
        model.meta["n"] = dataset.n
    return model, report


def train_arrays(x, y, input_dim: int, layers: int, neurons: int, config: Optional[TrainConfig] = None):
    cfg = config or TrainConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if len(y) < 2:
        raise ValueError("need at least two samples to split train/validation")
    if x.shape != (len(y), input_dim):
        raise ValueError(f"inputs have shape {x.shape}, expected ({len(y)}, {input_dim})")

    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(y))
    n_train = min(len(y) - 1, max(1, int(round(cfg.train_fraction * len(y)))))
    tr, va = order[:n_train], order[n_train:]
    scale = _input_scale(input_dim)
    x_tr, y_tr = x[tr] * scale, y[tr]
    x_va, y_va = x[va] * scale, y[va]

    model = init_model(input_dim, layers, neurons, seed=cfg.seed)
    params = model.params()
    m_state = [np.zeros_like(p) for p in params]
    v_state = [np.zeros_like(p) for p in params]
    t_step = 0
    report = TrainReport()
    best = model.copy()
    best_loss = math.inf
    stale = 0

    for epoch in range(cfg.epochs):
        perm = rng.permutation(n_train)
        seen = 0.0
        for lo in range(0, n_train, cfg.batch_size):
            idx = perm[lo : lo + cfg.batch_size]
            loss, gw, gb = _loss_and_grad_scaled(model, x_tr[idx], y_tr[idx])
            if not math.isfinite(loss):
                raise FloatingPointError(
                    f"non-finite training loss at epoch {epoch}, batch offset {lo} "
                    f"(L={layers}, N={neurons}, lr={cfg.learning_rate})"
                )
            seen += loss * len(idx)
            t_step += 1
            grads = [g for pair in zip(gw, gb) for g in pair]
            c1 = 1.0 - cfg.beta1**t_step
            c2 = 1.0 - cfg.beta2**t_step
            for p, g, mm, vv in zip(params, grads, m_state, v_state):
                mm *= cfg.beta1
                mm += (1.0 - cfg.beta1) * g
                vv *= cfg.beta2
                vv += (1.0 - cfg.beta2) * g * g
                p -= cfg.learning_rate * (mm / c1) / (np.sqrt(vv / c2) + cfg.eps)
        val = _mse(model, x_va, y_va)
        if not math.isfinite(val):
            raise FloatingPointError(f"non-finite validation loss at epoch {epoch}")
        report.train_loss.append(seen / n_train)
        report.val_loss.append(val)
        if val < best_loss:
            best_loss, stale = val, 0
            best = model.copy()
            report.best_epoch = epoch
        else:
            stale += 1
            if stale >= cfg.patience:
                log.info("early stop at epoch %d (best %d)", epoch, report.best_epoch)
                break

    best.meta.update(
        seed=cfg.seed,
        best_val_loss=best_loss,
        best_epoch=report.best_epoch,
        optimizer={"name": "adam", "lr": cfg.learning_rate, "beta1": cfg.beta1, "beta2": cfg.beta2},
        batch_size=cfg.batch_size,
        samples=len(y),
    )
    return best, report


def grid_search(
    dataset,
    layer_range: Sequence[int],
    neuron_range: Sequence[int],
    config: Optional[TrainConfig] = None,
    input_dim: int = 2,
) -> np.ndarray:
    """Best validation loss for each ``(L, N)`` cell; failed cells are NaN."""
    if not layer_range or not neuron_range:
        raise ValueError("layer and neuron ranges must be nonempty")
    x, y = dataset_arrays(dataset, input_dim)
    out = np.full((len(layer_range), len(neuron_range)), np.nan)
    for i, L in enumerate(layer_range):
        for j, N in enumerate(neuron_range):
            try:
                _, rep = train_arrays(x, y, input_dim, L, N, config)
                out[i, j] = rep.best_val_loss
            except (FloatingPointError, ValueError) as exc:
                log.warning("grid cell L=%d N=%d failed: %s", L, N, exc)
    return out


def save_grid_csv(losses: np.ndarray, layer_range, neuron_range, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["L", "N", "val_loss"])
        for i, L in enumerate(layer_range):
            for j, N in enumerate(neuron_range):
                v = losses[i, j]
                w.writerow([L, N, "" if np.isnan(v) else format(v, ".17g")])


def save_history_csv(report: TrainReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "val_loss"])
        for e, (a, b) in enumerate(zip(report.train_loss, report.val_loss)):
            w.writerow([e, format(a, ".17g"), format(b, ".17g")])


def _to_jsonable(v):
    if isinstance(v, dict):
        return {k: _to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_to_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


def save_model(model: MlpModel, path) -> None:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "input_dim": model.input_dim,
        "hidden_layers": model.layers,
        "neurons_per_layer": model.neurons,
        "hidden_activation": "selu",
        "output_activation": "sigmoid",
        "selu": {"lambda": SELU_LAMBDA, "alpha": SELU_ALPHA},
        "input_scaling": model.input_scale.tolist(),
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "metadata": _to_jsonable(model.meta),
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_model(path) -> MlpModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not a valid model document ({exc})") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"{path}: missing or wrong format tag")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported version {doc.get('version')!r}")
    if doc.get("hidden_activation") != "selu" or doc.get("output_activation") != "sigmoid":
        raise ModelFormatError(f"{path}: unsupported activations")
    try:
        d, L, N = int(doc["input_dim"]), int(doc["hidden_layers"]), int(doc["neurons_per_layer"])
        ws = [np.array(w, dtype=float) for w in doc["weights"]]
        bs = [np.array(b, dtype=float) for b in doc["biases"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed field ({exc})") from None
    if d not in (2, 3):
        raise ModelFormatError(f"{path}: input_dim {d} not in (2, 3)")
    shapes = _layer_shapes(d, L, N)
    if len(ws) != len(shapes) or len(bs) != len(shapes):
        raise ModelFormatError(f"{path}: expected {len(shapes)} layers, found {len(ws)}/{len(bs)}")
    for l, ((i, o), w, b) in enumerate(zip(shapes, ws, bs)):
        if w.shape != (i, o) or b.shape != (o,):
            raise ModelFormatError(f"{path}: layer {l} has shapes {w.shape}/{b.shape}, expected {(i, o)}/{(o,)}")
    if not np.array_equal(np.asarray(doc.get("input_scaling", []), dtype=float), _input_scale(d)):
        raise ModelFormatError(f"{path}: input scaling does not match this version")
    return MlpModel(d, L, N, ws, bs, doc.get("metadata", {}))


def predict_p(model: MlpModel, phi, zeta, n: Optional[int] = None):
    """Surrogate probability at raw angles; ``n`` is required iff the model takes it."""
    if model.input_dim == 3 and n is None:
        raise ValueError("this model needs the coin qubit count n")
    if model.input_dim == 2 and n is not None:
        raise ValueError("this model does not take n")
    phi, zeta = np.broadcast_arrays(np.asarray(phi, dtype=float), np.asarray(zeta, dtype=float))
    cols = [phi.ravel(), zeta.ravel()]
    if n is not None:
        cols.append(np.full(phi.size, float(n)))
    y = forward(model, np.column_stack(cols))
    return float(y[0]) if phi.ndim == 0 else y.reshape(phi.shape)
