"""Sigmoid MLP with batch normalisation, trained with Adam on MSE.

Everything is plain numpy in float64 with hand-written backpropagation,
so every gradient can be checked against finite differences.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import BOUNDARIES, PLATE_TYPES, PROBLEMS, Sample

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
SCALARS = ("kx", "ky", "kz", "kw_bar", "a_over_h0")


class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch: int):
        super().__init__(f"loss became non-finite at epoch {epoch}")
        self.epoch = epoch


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


# --------------------------------------------------------------------------- encoding

@dataclass
class FeatureSchema:
    """One-hot blocks (problem, bc, plate type) followed by z-scored scalars.

    Targets are log-transformed and z-scored per problem kind.
    """

    mean: np.ndarray
    std: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    target_mean: dict
    target_std: dict
    problems: tuple = PROBLEMS
    boundaries: tuple = BOUNDARIES
    plate_types: tuple = PLATE_TYPES

    @property
    def width(self) -> int:
        return len(self.problems) + len(self.boundaries) + len(self.plate_types) + len(SCALARS)

    @classmethod
    def fit(cls, samples: Sequence[Sample]) -> "FeatureSchema":
        raw = np.array([[getattr(s, k) for k in SCALARS] for s in samples], dtype=float)
        std = raw.std(axis=0)
        std[std == 0] = 1.0
        t_mean, t_std = {}, {}
        for p in PROBLEMS:
            y = np.log([s.target for s in samples if s.problem == p])
            if len(y) == 0:
                t_mean[p], t_std[p] = 0.0, 1.0
                continue
            t_mean[p] = float(y.mean())
            t_std[p] = float(y.std()) if len(y) > 1 and y.std() > 0 else 1.0
        return cls(raw.mean(axis=0), std, raw.min(axis=0), raw.max(axis=0), t_mean, t_std)

    def _onehot(self, value, options, name):
        out = np.zeros(len(options))
        try:
            out[list(options).index(value)] = 1.0
        except ValueError:
            raise ValueError(f"unseen {name} value {value!r}; expected one of {options}") from None
        return out

    def encode(self, sample) -> np.ndarray:
        scalars = np.array([float(getattr(sample, k)) for k in SCALARS])
        return np.concatenate([
            self._onehot(sample.problem, self.problems, "problem"),
            self._onehot(sample.bc, self.boundaries, "bc"),
            self._onehot(int(sample.plate_type), self.plate_types, "plate_type"),
            (scalars - self.mean) / self.std,
        ])

    def encode_many(self, samples) -> np.ndarray:
        return np.array([self.encode(s) for s in samples]).reshape(-1, self.width)

    def normalize_targets(self, samples) -> np.ndarray:
        return np.array([(math.log(s.target) - self.target_mean[s.problem]) / self.target_std[s.problem]
                         for s in samples])

    def denormalize(self, problems, z) -> np.ndarray:
        mu = np.array([self.target_mean[p] for p in problems])
        sd = np.array([self.target_std[p] for p in problems])
        return np.exp(np.asarray(z) * sd + mu)

    def out_of_range(self, sample) -> list[str]:
        notes = []
        for i, k in enumerate(SCALARS):
            v = float(getattr(sample, k))
            if v < self.lower[i] or v > self.upper[i]:
                notes.append(f"{k}={v:g} outside training range [{self.lower[i]:g}, {self.upper[i]:g}]")
        return notes

    def to_dict(self) -> dict:
        return {
            "problems": list(self.problems),
            "boundaries": list(self.boundaries),
            "plate_types": list(self.plate_types),
            "scalars": list(SCALARS),
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "target_transform": "log",
            "target_mean": self.target_mean,
            "target_std": self.target_std,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSchema":
        if tuple(d["scalars"]) != SCALARS:
            raise ValueError(f"unsupported scalar feature order {d['scalars']}")
        return cls(np.array(d["mean"]), np.array(d["std"]), np.array(d["lower"]), np.array(d["upper"]),
                   dict(d["target_mean"]), dict(d["target_std"]), tuple(d["problems"]),
                   tuple(d["boundaries"]), tuple(int(t) for t in d["plate_types"]))


# --------------------------------------------------------------------------- network

class MLP:
    """Dense layers; hidden ones are Linear -> BatchNorm -> sigmoid.

    With batch norm the hidden linear layers carry no bias (beta replaces it).
    """

    def __init__(self, sizes=(17, 64, 64, 64, 1), batch_norm=True, bn_eps=1e-5, momentum=0.99, seed=0):
        self.sizes = tuple(int(s) for s in sizes)
        self.batch_norm = bool(batch_norm)
        self.bn_eps = float(bn_eps)
        self.momentum = float(momentum)
        rng = np.random.default_rng(seed)
        self.params: dict[str, np.ndarray] = {}
        self.buffers: dict[str, np.ndarray] = {}
        n_layers = len(self.sizes) - 1
        for i in range(n_layers):
            fan_in, fan_out = self.sizes[i], self.sizes[i + 1]
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            self.params[f"W{i}"] = rng.uniform(-limit, limit, (fan_in, fan_out))
            hidden = i < n_layers - 1
            if hidden and self.batch_norm:
                self.params[f"gamma{i}"] = np.ones(fan_out)
                self.params[f"beta{i}"] = np.zeros(fan_out)
                self.buffers[f"mean{i}"] = np.zeros(fan_out)
                self.buffers[f"var{i}"] = np.ones(fan_out)
            else:
                self.params[f"b{i}"] = np.zeros(fan_out)

    @property
    def n_layers(self) -> int:
        return len(self.sizes) - 1

    def forward(self, x, training=False, update_stats=True):
        """Return (output, cache). ``training`` selects batch statistics."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.sizes[0]:
            raise ValueError(f"expected input of shape (n, {self.sizes[0]}), got {x.shape}")
        if training and self.batch_norm and x.shape[0] < 2:
            raise ValueError("batch norm needs at least 2 samples per training batch")
        cache = []
        h = x
        for i in range(self.n_layers):
            z = h @ self.params[f"W{i}"]
            layer = {"h_in": h}
            if i == self.n_layers - 1:
                out = z + self.params[f"b{i}"]
                cache.append(layer)
                return out[:, 0], cache
            if self.batch_norm:
                if training:
                    mu = z.mean(axis=0)
                    var = z.var(axis=0)
                    if update_stats:
                        m = self.momentum
                        self.buffers[f"mean{i}"] = m * self.buffers[f"mean{i}"] + (1 - m) * mu
                        self.buffers[f"var{i}"] = m * self.buffers[f"var{i}"] + (1 - m) * var
                else:
                    mu, var = self.buffers[f"mean{i}"], self.buffers[f"var{i}"]
                inv_std = 1.0 / np.sqrt(var + self.bn_eps)
                xhat = (z - mu) * inv_std
                z = self.params[f"gamma{i}"] * xhat + self.params[f"beta{i}"]
                layer.update(xhat=xhat, inv_std=inv_std)
            else:
                z = z + self.params[f"b{i}"]
            h = sigmoid(z)
            layer["a"] = h
            cache.append(layer)
        raise AssertionError("unreachable")

    def backward(self, cache, dout):
        """Gradients of a scalar loss given d loss / d output (training mode)."""
        grads = {}
        g = np.asarray(dout, dtype=float)[:, None]
        for i in reversed(range(self.n_layers)):
            layer = cache[i]
            if i < self.n_layers - 1:
                a = layer["a"]
                g = g * a * (1.0 - a)
                if self.batch_norm:
                    xhat, inv_std = layer["xhat"], layer["inv_std"]
                    grads[f"gamma{i}"] = np.sum(g * xhat, axis=0)
                    grads[f"beta{i}"] = np.sum(g, axis=0)
                    dxhat = g * self.params[f"gamma{i}"]
                    n = dxhat.shape[0]
                    g = (inv_std / n) * (n * dxhat - dxhat.sum(axis=0) - xhat * np.sum(dxhat * xhat, axis=0))
                else:
                    grads[f"b{i}"] = g.sum(axis=0)
            else:
                grads[f"b{i}"] = g.sum(axis=0)
            grads[f"W{i}"] = layer["h_in"].T @ g
            if i > 0:
                g = g @ self.params[f"W{i}"].T
        return grads

    def loss_and_grads(self, x, y, update_stats=True):
        pred, cache = self.forward(x, training=True, update_stats=update_stats)
        diff = pred - y
        loss = float(np.mean(diff**2))
        return loss, self.backward(cache, 2.0 * diff / len(y))

    def predict(self, x):
        return self.forward(x, training=False)[0]

    def refresh_statistics(self, x):
        """Replace the running BN statistics with population statistics of ``x``."""
        if not self.batch_norm:
            return
        momentum, self.momentum = self.momentum, 0.0
        try:
            self.forward(x, training=True, update_stats=True)
        finally:
            self.momentum = momentum

    def to_dict(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "batch_norm": self.batch_norm,
            "activation": "sigmoid",
            "bn_eps": self.bn_eps,
            "momentum": self.momentum,
            "params": {k: v.tolist() for k, v in self.params.items()},
            "buffers": {k: v.tolist() for k, v in self.buffers.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MLP":
        net = cls(d["sizes"], d["batch_norm"], d["bn_eps"], d["momentum"])
        net.params = {k: np.array(v, dtype=float) for k, v in d["params"].items()}
        net.buffers = {k: np.array(v, dtype=float) for k, v in d["buffers"].items()}
        return net


class Adam:
    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def step(self, params, grads):
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for k, g in grads.items():
            m = self.m.get(k)
            if m is None:
                m = self.m[k] = np.zeros_like(g)
                self.v[k] = np.zeros_like(g)
            v = self.v[k]
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            params[k] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


# --------------------------------------------------------------------------- training

@dataclass
class TrainConfig:
    epochs: int = 5000
    val_fraction: float = 0.1
    batch_size: int = 256
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    hidden: tuple = (64, 64, 64)
    batch_norm: bool = True
    bn_eps: float = 1e-5
    momentum: float = 0.99
    lr_schedule: str = "constant"  # or "cosine", decaying to lr * lr_floor
    lr_floor: float = 0.01
    refresh_bn: bool = False
    seed: int = 0


def learning_rate(config: TrainConfig, epoch: int) -> float:
    if config.lr_schedule == "constant":
        return config.lr
    if config.lr_schedule == "cosine":
        frac = (epoch - 1) / max(config.epochs - 1, 1)
        low = config.lr * config.lr_floor
        return low + 0.5 * (config.lr - low) * (1.0 + math.cos(math.pi * frac))
    raise ValueError(f"unknown lr_schedule {config.lr_schedule!r}")


@dataclass
class TrainingHistory:
    train_mse: list = field(default_factory=list)
    val_mse: list = field(default_factory=list)
    train_index: np.ndarray = field(default_factory=lambda: np.empty(0, int))
    val_index: np.ndarray = field(default_factory=lambda: np.empty(0, int))

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epoch,train_mse,val_mse\n")
            for i, (t, v) in enumerate(zip(self.train_mse, self.val_mse), 1):
                fh.write(f"{i},{t!r},{v!r}\n")


@dataclass
class SurrogateModel:
    schema: FeatureSchema
    net: MLP

    def predict_many(self, samples) -> np.ndarray:
        z = self.net.predict(self.schema.encode_many(samples))
        return self.schema.denormalize([s.problem for s in samples], z)

    def to_dict(self) -> dict:
        return {"format": "fgplate-surrogate", "format_version": FORMAT_VERSION,
                "schema": self.schema.to_dict(), "network": self.net.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "SurrogateModel":
        if d.get("format") != "fgplate-surrogate":
            raise ValueError("not an fgplate surrogate model file")
        if d.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {d.get('format_version')}")
        return cls(FeatureSchema.from_dict(d["schema"]), MLP.from_dict(d["network"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SurrogateModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def split_indices(n: int, val_fraction: float, seed: int):
    perm = np.random.default_rng(seed).permutation(n)
    n_val = int(round(val_fraction * n))
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def _mse(net, x, y):
    if len(y) == 0:
        return float("nan")
    return float(np.mean((net.predict(x) - y) ** 2))


def train(samples: Sequence[Sample], config: TrainConfig | None = None, progress: bool = False):
    """Fit a surrogate; returns ``(SurrogateModel, TrainingHistory)``.

    MSE values in the history are on normalised targets.
    """
    config = config or TrainConfig()
    samples = list(samples)
    if len(samples) < 2:
        raise ValueError("need at least 2 samples to train")
    tr_idx, va_idx = split_indices(len(samples), config.val_fraction, config.seed)
    train_set = [samples[i] for i in tr_idx]
    val_set = [samples[i] for i in va_idx]
    schema = FeatureSchema.fit(train_set)
    x_tr, y_tr = schema.encode_many(train_set), schema.normalize_targets(train_set)
    x_va, y_va = schema.encode_many(val_set), schema.normalize_targets(val_set)

    sizes = (schema.width, *config.hidden, 1)
    net = MLP(sizes, config.batch_norm, config.bn_eps, config.momentum, seed=config.seed)
    opt = Adam(config.lr, config.beta1, config.beta2, config.eps)
    rng = np.random.default_rng(config.seed + 1)
    history = TrainingHistory(train_index=tr_idx, val_index=va_idx)
    n = len(y_tr)
    bs = min(config.batch_size, n)

    epochs = range(1, config.epochs + 1)
    if progress:
        from tqdm import tqdm

        epochs = tqdm(epochs, desc="train")
    for epoch in epochs:
        opt.lr = learning_rate(config, epoch)
        perm = rng.permutation(n)
        for start in range(0, n, bs):
            idx = perm[start:start + bs]
            if len(idx) < 2:
                continue
            loss, grads = net.loss_and_grads(x_tr[idx], y_tr[idx])
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch)
            opt.step(net.params, grads)
        if config.refresh_bn:
            net.refresh_statistics(x_tr)
        t, v = _mse(net, x_tr, y_tr), _mse(net, x_va, y_va)
        if not math.isfinite(t):
            raise TrainingDivergedError(epoch)
        history.train_mse.append(t)
        history.val_mse.append(v)
        if epoch % 500 == 0:
            log.info("epoch %d train %.3e val %.3e", epoch, t, v)
    return SurrogateModel(schema, net), history


@dataclass
class Prediction:
    value: float
    in_range: bool
    notes: list


def predict(model: SurrogateModel, descriptor) -> Prediction:
    """Non-dimensional response for one case descriptor (inference-mode BN)."""
    if isinstance(descriptor, dict):
        descriptor = Sample(**{k: descriptor[k] for k in
                               ("problem", "bc", "kx", "ky", "kz", "kw_bar", "plate_type", "a_over_h0")})
    value = float(model.predict_many([descriptor])[0])
    notes = model.schema.out_of_range(descriptor)
    if notes:
        log.warning("extrapolating: %s", "; ".join(notes))
    return Prediction(value, not notes, notes)
