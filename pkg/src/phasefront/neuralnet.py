"""Minimal fully connected network with Swish activations.

Forward pass, analytic reverse-mode gradient of the mean squared error, Adam
updates, a deterministic mini-batch training loop, and a flat binary model
format. The production architecture is 4 hidden layers of width 96 with a
linear output; smaller dimension chains are supported for testing.

All randomness (weight initialization, shuffling, validation split) comes
from the package Rng, so training is bitwise reproducible for a given seed.
"""

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import FormatError, InvalidInput, TrainingDiverged
from .numerics import Rng

#: Architecture used by all learned front models.
DEFAULT_LAYER_DIMS = (3, 96, 96, 96, 96, 1)

_MLP_MAGIC = b"MLP1"


def swish(x):
    """Swish activation x * sigmoid(x)."""
    return x * expit(x)


def swish_prime(x):
    """Derivative of swish: sigmoid(x) * (1 + x * (1 - sigmoid(x)))."""
    s = expit(x)
    return s * (1.0 + x * (1.0 - s))


@dataclass
class MlpModel:
    """Weights, biases and input-normalization statistics.

    ``weights[k]`` has shape (dims[k], dims[k+1]); features are standardized
    with the stored per-feature mean and std before the first layer.
    """

    layer_dims: tuple
    weights: list
    biases: list
    feat_mean: np.ndarray
    feat_std: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        if len(dims) < 2:
            raise InvalidInput("need at least input and output dims")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[k], dims[k + 1]) or b.shape != (dims[k + 1],):
                raise InvalidInput(f"layer {k} shapes inconsistent with dims {dims}")
        if len(self.weights) != len(dims) - 1:
            raise InvalidInput("layer count inconsistent with dims")
        if self.feat_mean.shape != (dims[0],) or self.feat_std.shape != (dims[0],):
            raise InvalidInput("normalization stats must match the input width")
        if np.any(self.feat_std <= 0):
            raise InvalidInput("normalization std must be > 0")
        self.layer_dims = dims

    @property
    def n_inputs(self):
        return self.layer_dims[0]


def init_model(rng: Rng, layer_dims=DEFAULT_LAYER_DIMS) -> MlpModel:
    """Glorot-uniform weights, zero biases, identity normalization."""
    dims = tuple(layer_dims)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(fan_in * fan_out, -bound, bound).reshape(fan_in, fan_out)
        weights.append(w)
        biases.append(np.zeros(fan_out))
    return MlpModel(dims, weights, biases,
                    feat_mean=np.zeros(dims[0]), feat_std=np.ones(dims[0]))


def zero_model(layer_dims=DEFAULT_LAYER_DIMS) -> MlpModel:
    """All-zero weights and biases; the network output is identically 0."""
    dims = tuple(layer_dims)
    weights = [np.zeros((i, o)) for i, o in zip(dims[:-1], dims[1:])]
    biases = [np.zeros(o) for o in dims[1:]]
    return MlpModel(dims, weights, biases,
                    feat_mean=np.zeros(dims[0]), feat_std=np.ones(dims[0]))


def _forward_cached(model: MlpModel, features):
    xn = (features - model.feat_mean) / model.feat_std
    pre, post = [], [xn]
    act = xn
    last = len(model.weights) - 1
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = act @ w + b
        pre.append(z)
        act = z if k == last else swish(z)
        post.append(act)
    return pre, post


def mlp_forward(model: MlpModel, features) -> np.ndarray:
    """Evaluate the network on an (N, n_inputs) batch; returns (N, 1)."""
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if features.shape[1] != model.n_inputs:
        raise InvalidInput(f"expected {model.n_inputs} features, got {features.shape[1]}")
    if not np.all(np.isfinite(features)):
        raise InvalidInput("features contain non-finite values")
    _, post = _forward_cached(model, features)
    return post[-1]


def mlp_gradient(model: MlpModel, features, targets):
    """Loss and exact gradient of L = mean((out - target)^2).

    Returns (loss, grads) with grads a list of (dW, db) per layer.
    """
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    targets = np.asarray(targets, dtype=np.float64).reshape(features.shape[0], -1)
    pre, post = _forward_cached(model, features)
    out = post[-1]
    resid = out - targets
    n = features.shape[0]
    loss = float(np.mean(resid * resid))

    grads = [None] * len(model.weights)
    delta = 2.0 * resid / (n * resid.shape[1])
    for k in range(len(model.weights) - 1, -1, -1):
        grads[k] = (post[k].T @ delta, delta.sum(axis=0))
        if k > 0:
            delta = (delta @ model.weights[k].T) * swish_prime(pre[k - 1])
    return loss, grads


# ---------------------------------------------------------------------------
# optimization


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 1024
    epochs: int = 50
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    shuffle_seed: int = 0
    validation_fraction: float = 0.1

    def __post_init__(self):
        if not (self.learning_rate > 0 and self.batch_size > 0 and self.epochs > 0):
            raise InvalidInput("learning_rate, batch_size and epochs must be > 0")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1 and self.eps > 0):
            raise InvalidInput("invalid Adam parameters")
        if not 0 <= self.validation_fraction < 0.5:
            raise InvalidInput("validation_fraction must be in [0, 0.5)")


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0

    @classmethod
    def for_model(cls, model: MlpModel):
        return cls(
            m=[(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(model.weights, model.biases)],
            v=[(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(model.weights, model.biases)],
        )


def adam_step(model: MlpModel, state: AdamState, grads, cfg: TrainConfig):
    """One Adam update with bias correction; mutates model and state."""
    state.t += 1
    b1t = 1.0 - cfg.beta1 ** state.t
    b2t = 1.0 - cfg.beta2 ** state.t
    for k, (gw, gb) in enumerate(grads):
        mw, mb = state.m[k]
        vw, vb = state.v[k]
        mw *= cfg.beta1
        mw += (1.0 - cfg.beta1) * gw
        mb *= cfg.beta1
        mb += (1.0 - cfg.beta1) * gb
        vw *= cfg.beta2
        vw += (1.0 - cfg.beta2) * gw * gw
        vb *= cfg.beta2
        vb += (1.0 - cfg.beta2) * gb * gb
        model.weights[k] -= cfg.learning_rate * (mw / b1t) / (np.sqrt(vw / b2t) + cfg.eps)
        model.biases[k] -= cfg.learning_rate * (mb / b1t) / (np.sqrt(vb / b2t) + cfg.eps)
    return model, state


def train(features, targets, cfg: TrainConfig, layer_dims=DEFAULT_LAYER_DIMS,
          rng: Rng | None = None):
    """Mini-batch Adam training of a fresh model.

    Rows are shuffled once for the train/validation split and re-shuffled
    every epoch; normalization statistics come from the training split only.
    Falls back to full-batch updates when fewer rows than ``batch_size`` are
    available. Returns (model, history) where history holds per-epoch train
    and validation MSE.

    Raises TrainingDiverged (with the epoch index) if the loss goes
    non-finite.
    """
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64).reshape(features.shape[0], 1)
    n = features.shape[0]
    if n < 2:
        raise InvalidInput("need at least 2 rows to train")
    rng = rng if rng is not None else Rng(cfg.shuffle_seed)

    model = init_model(rng, layer_dims)

    order = rng.permutation(n)
    n_val = int(round(n * cfg.validation_fraction))
    val_idx, train_idx = order[:n_val], order[n_val:]
    x_tr, y_tr = features[train_idx], targets[train_idx]
    x_val, y_val = features[val_idx], targets[val_idx]

    mean = x_tr.mean(axis=0)
    std = x_tr.std(axis=0)
    std[std == 0.0] = 1.0  # constant feature maps to 0
    model.feat_mean, model.feat_std = mean, std

    state = AdamState.for_model(model)
    batch = min(cfg.batch_size, len(x_tr))
    history = {"train_mse": [], "val_mse": []}

    for epoch in range(cfg.epochs):
        perm = rng.permutation(len(x_tr))
        epoch_loss = 0.0
        for start in range(0, len(x_tr) - batch + 1, batch):
            rows = perm[start:start + batch]
            loss, grads = mlp_gradient(model, x_tr[rows], y_tr[rows])
            if not np.isfinite(loss):
                raise TrainingDiverged(f"non-finite loss at epoch {epoch}", epoch=epoch)
            adam_step(model, state, grads, cfg)
            epoch_loss += loss * len(rows)
        n_used = (len(x_tr) // batch) * batch
        history["train_mse"].append(epoch_loss / n_used)
        if len(x_val):
            val_out = mlp_forward(model, x_val)
            history["val_mse"].append(float(np.mean((val_out - y_val) ** 2)))
        else:
            history["val_mse"].append(np.nan)

    return model, history


# ---------------------------------------------------------------------------
# serialization

def save_model(path, model: MlpModel):
    """Write the flat binary model format.

    Layout (little-endian): magic 'MLP1', u32 layer count, u32 dims, f64
    normalization means then stds (input width each), then per layer the
    row-major (fan_in, fan_out) weight matrix followed by the bias vector.
    """
    with open(path, "wb") as fh:
        fh.write(_MLP_MAGIC)
        dims = model.layer_dims
        fh.write(struct.pack("<I", len(dims)))
        fh.write(struct.pack(f"<{len(dims)}I", *dims))
        fh.write(model.feat_mean.astype("<f8").tobytes())
        fh.write(model.feat_std.astype("<f8").tobytes())
        for w, b in zip(model.weights, model.biases):
            fh.write(w.astype("<f8").tobytes())
            fh.write(b.astype("<f8").tobytes())


def load_model(path) -> MlpModel:
    """Read a model written by :func:`save_model`; lossless round trip."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _MLP_MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}, expected {_MLP_MAGIC!r}")
    off = 4
    try:
        (n_layers,) = struct.unpack_from("<I", data, off)
        off += 4
        dims = struct.unpack_from(f"<{n_layers}I", data, off)
        off += 4 * n_layers
    except struct.error as exc:
        raise FormatError("truncated model header") from exc

    def take(count):
        nonlocal off
        end = off + 8 * count
        if end > len(data):
            raise FormatError("truncated model payload")
        arr = np.frombuffer(data[off:end], dtype="<f8").copy()
        off = end
        return arr

    mean = take(dims[0])
    std = take(dims[0])
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(take(fan_in * fan_out).reshape(fan_in, fan_out))
        biases.append(take(fan_out))
    if off != len(data):
        raise FormatError(f"{len(data) - off} trailing bytes in model file")
    return MlpModel(dims, weights, biases, feat_mean=mean, feat_std=std)
