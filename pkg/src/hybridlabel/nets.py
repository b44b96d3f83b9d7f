"""From-scratch feed-forward networks: affine-ReLU stack with one or more
affine heads, analytic backprop, Adam, and reduce-on-plateau scheduling.

Everything runs in float64 numpy and is deterministic under a fixed seed
(seeded He-uniform init, seeded per-epoch shuffles, single-threaded
updates).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimMismatchError, InsufficientEpochsError, NonFiniteLossError


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    weight_decay: float = 1e-4
    scheduler_factor: float = 0.1
    scheduler_patience: int = 5
    max_epochs: int = 100
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 < self.scheduler_factor < 1.0:
            raise ValueError("scheduler_factor must be in (0, 1)")
        if self.scheduler_patience < 1:
            raise ValueError("scheduler_patience must be >= 1")
        if self.max_epochs < 1 or self.batch_size < 1:
            raise ValueError("max_epochs and batch_size must be >= 1")


class FeedForwardNet:
    """Affine-ReLU stack feeding parallel affine heads.

    ``widths`` gives the input dimension followed by at least one hidden
    width; ``head_widths`` the output width of each head branching from
    the last hidden layer. A single-output regressor is
    ``FeedForwardNet((d, 64, 64), (1,))``; a shared-stack two-head model
    is ``FeedForwardNet((d, 64, 64), (n_classes, 1))``.

    Initialisation is He-uniform (limit sqrt(6/fan_in)) with zero biases,
    drawn from a seeded RNG in a fixed order: shared layers first, then
    heads in order. Two nets built with the same seed therefore share
    identical shared-stack parameters even if their later heads differ.
    """

    def __init__(self, widths: Sequence[int], head_widths: Sequence[int] = (1,),
                 seed: int = 0):
        widths = tuple(int(w) for w in widths)
        head_widths = tuple(int(w) for w in head_widths)
        if len(widths) < 2:
            raise ValueError("widths needs an input dim and >= 1 hidden layer")
        if any(w < 1 for w in widths) or any(w < 1 for w in head_widths):
            raise ValueError("all layer widths must be >= 1")
        if not head_widths:
            raise ValueError("at least one head is required")
        self.widths = widths
        self.head_widths = head_widths
        rng = np.random.default_rng(seed)
        self.layers = [
            self._init_layer(rng, widths[i], widths[i + 1])
            for i in range(len(widths) - 1)
        ]
        self.heads = [self._init_layer(rng, widths[-1], h) for h in head_widths]

    @staticmethod
    def _init_layer(rng, fan_in: int, fan_out: int):
        limit = np.sqrt(6.0 / fan_in)
        w = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        return [w, np.zeros(fan_out)]

    @property
    def input_dim(self) -> int:
        return self.widths[0]

    def parameters(self) -> List[np.ndarray]:
        """Flat list of parameter arrays (mutated in place by optimisers)."""
        out = []
        for w, b in self.layers + self.heads:
            out.extend((w, b))
        return out

    def _check_input(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise DimMismatchError(
                f"expected features of dimension {self.input_dim}, got shape "
                f"{X.shape}"
            )
        return X

    def forward(self, X) -> List[np.ndarray]:
        """Head outputs for a batch; hidden layers ReLU, heads affine."""
        return self.forward_cache(X)[0]

    def forward_cache(self, X):
        X = self._check_input(X)
        acts = [X]
        zs = []
        a = X
        for w, b in self.layers:
            z = a @ w + b
            a = np.maximum(z, 0.0)
            zs.append(z)
            acts.append(a)
        outs = [a @ w + b for w, b in self.heads]
        return outs, (acts, zs)

    def backward(self, cache, d_outputs: Sequence[np.ndarray],
                 weight_decay: float = 0.0) -> List[np.ndarray]:
        """Gradients w.r.t. every parameter, aligned with ``parameters()``.

        ``d_outputs`` holds the loss gradient at each head output. The
        weight-decay term ``weight_decay * param`` is added to every
        gradient (decay enters the update through the gradient, ahead of
        the Adam moments).
        """
        acts, zs = cache
        h = acts[-1]
        head_grads = []
        dh = np.zeros_like(h)
        for (w, b), dout in zip(self.heads, d_outputs):
            head_grads.extend((h.T @ dout, dout.sum(axis=0)))
            dh += dout @ w.T
        layer_grads: List[np.ndarray] = []
        for i in range(len(self.layers) - 1, -1, -1):
            dz = dh * (zs[i] > 0.0)
            w, b = self.layers[i]
            layer_grads[:0] = [acts[i].T @ dz, dz.sum(axis=0)]
            dh = dz @ w.T
        grads = layer_grads + head_grads
        if weight_decay:
            grads = [g + weight_decay * p for g, p in zip(grads, self.parameters())]
        return grads

    def predict(self, X) -> np.ndarray:
        """Output of the first (or only) head."""
        return self.forward(X)[0]

    # --- checkpointing ----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "widths": list(self.widths),
            "head_widths": list(self.head_widths),
            "layers": [{"w": w.tolist(), "b": b.tolist()} for w, b in self.layers],
            "heads": [{"w": w.tolist(), "b": b.tolist()} for w, b in self.heads],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FeedForwardNet":
        net = cls(doc["widths"], doc["head_widths"])
        for layer, stored in zip(net.layers + net.heads, doc["layers"] + doc["heads"]):
            layer[0] = np.asarray(stored["w"], dtype=np.float64)
            layer[1] = np.asarray(stored["b"], dtype=np.float64)
        return net

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "FeedForwardNet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


# --- losses ---------------------------------------------------------------

def mse_loss(pred: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean squared error over all elements; returns (loss, d_loss/d_pred)."""
    target = np.asarray(target, dtype=np.float64).reshape(pred.shape)
    r = pred - target
    return float(np.mean(r**2)), (2.0 / r.size) * r


def cross_entropy_loss(logits: np.ndarray, classes0: np.ndarray) -> Tuple[float, np.ndarray]:
    """Softmax cross-entropy; ``classes0`` are 0-based class indices.

    Returns (loss, d_loss/d_logits).
    """
    classes0 = np.asarray(classes0, dtype=np.int64)
    z = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(z)
    probs = expz / expz.sum(axis=1, keepdims=True)
    n = len(classes0)
    picked = probs[np.arange(n), classes0]
    loss = float(-np.mean(np.log(np.maximum(picked, 1e-300))))
    grad = probs.copy()
    grad[np.arange(n), classes0] -= 1.0
    return loss, grad / n


# --- optimiser and scheduler -----------------------------------------------

class Adam:
    """Adam with bias correction; parameters are updated in place.

    A zero gradient leaves parameters untouched (moments stay zero, so the
    bias-corrected step is exactly zero).
    """

    def __init__(self, params: List[np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads: List[np.ndarray]) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


class ReduceLROnPlateau:
    """Multiply the LR by ``factor`` after ``patience`` consecutive epochs
    without validation-loss improvement.

    Improvement means the monitored value dropped below the best seen so
    far by more than ``threshold`` (absolute). The reduction fires on the
    (patience + 1)-th consecutive bad epoch; ``events`` records
    (step_index, new_lr) for each reduction. The LR never increases.
    """

    def __init__(self, lr: float, factor: float = 0.1, patience: int = 5,
                 threshold: float = 1e-8):
        self.lr = lr
        self.factor = factor
        self.patience = patience
        self.threshold = threshold
        self.best = np.inf
        self.num_bad = 0
        self.step_count = 0
        self.events: List[Tuple[int, float]] = []

    def step(self, value: float) -> float:
        self.step_count += 1
        if value < self.best - self.threshold:
            self.best = value
            self.num_bad = 0
        else:
            self.num_bad += 1
            if self.num_bad > self.patience:
                self.lr *= self.factor
                self.num_bad = 0
                self.events.append((self.step_count, self.lr))
        return self.lr


# --- training loop ----------------------------------------------------------

@dataclass
class TrainTrace:
    """Per-epoch diagnostics; entry i describes 1-based epoch i+1.

    ``mean_abs_grad`` is the mean of |g| over all trainable parameters for
    the last batch of the epoch (decay term included); ``learning_rate``
    is the LR the optimiser used during that epoch.
    """

    train_loss: List[float] = field(default_factory=list)
    val_loss: List[float] = field(default_factory=list)
    mean_abs_grad: List[float] = field(default_factory=list)
    learning_rate: List[float] = field(default_factory=list)

    @property
    def n_epochs(self) -> int:
        return len(self.train_loss)

    def to_json_dict(self) -> dict:
        return {
            "train_loss": list(self.train_loss),
            "val_loss": list(self.val_loss),
            "mean_abs_grad": list(self.mean_abs_grad),
            "learning_rate": list(self.learning_rate),
        }


def _dataset_loss(net, X, targets, losses, weights) -> float:
    outs = net.forward(X)
    total = 0.0
    for out, target, loss_fn, w in zip(outs, targets, losses, weights):
        total += w * loss_fn(out, target)[0]
    return total


def train(net: FeedForwardNet, X, targets, X_val, val_targets,
          config: TrainConfig, losses=(mse_loss,), loss_weights=None) -> TrainTrace:
    """Mini-batch Adam training with reduce-on-plateau scheduling.

    ``targets``/``val_targets`` are tuples with one target array per head;
    ``losses`` maps each head output and target to (loss, grad). The total
    loss is the weighted sum over heads (weights default to 1). Batches
    come from a seeded shuffle each epoch, so runs are reproducible
    bit-for-bit. Raises :class:`NonFiniteLossError` (with the partial
    trace attached) if any loss goes NaN/inf.
    """
    X = net._check_input(X)
    X_val = net._check_input(X_val)
    targets = tuple(np.asarray(t) for t in targets)
    val_targets = tuple(np.asarray(t) for t in val_targets)
    if len(targets) != len(net.heads) or len(losses) != len(net.heads):
        raise ValueError("need one target array and one loss per head")
    weights = tuple(loss_weights) if loss_weights is not None else (1.0,) * len(losses)

    rng = np.random.default_rng(config.seed)
    params = net.parameters()
    adam = Adam(params, lr=config.learning_rate)
    sched = ReduceLROnPlateau(
        config.learning_rate, config.scheduler_factor, config.scheduler_patience
    )
    trace = TrainTrace()
    n = len(X)
    for _epoch in range(1, config.max_epochs + 1):
        lr_used = adam.lr
        perm = rng.permutation(n)
        last_grads = None
        for start in range(0, n, config.batch_size):
            batch = perm[start : start + config.batch_size]
            outs, cache = net.forward_cache(X[batch])
            d_outs = []
            batch_loss = 0.0
            for out, target, loss_fn, w in zip(outs, targets, losses, weights):
                l, g = loss_fn(out, target[batch])
                batch_loss += w * l
                d_outs.append(w * g)
            if not np.isfinite(batch_loss):
                raise NonFiniteLossError(
                    f"non-finite training loss in epoch {_epoch}", trace=trace
                )
            last_grads = net.backward(cache, d_outs, config.weight_decay)
            adam.step(last_grads)
        train_loss = _dataset_loss(net, X, targets, losses, weights)
        val_loss = _dataset_loss(net, X_val, val_targets, losses, weights)
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise NonFiniteLossError(
                f"non-finite epoch loss in epoch {_epoch}", trace=trace
            )
        grand_total = sum(g.size for g in last_grads)
        mean_abs = sum(float(np.abs(g).sum()) for g in last_grads) / grand_total
        adam.lr = sched.step(val_loss)
        trace.train_loss.append(train_loss)
        trace.val_loss.append(val_loss)
        trace.mean_abs_grad.append(mean_abs)
        trace.learning_rate.append(lr_used)
    return trace


# --- training-progress guideline --------------------------------------------

@dataclass
class GuidelineVerdict:
    ok: bool
    loss_ok: bool
    grad_ok: bool
    min_loss_ratio: float
    max_grad_ratio: float
    epochs_considered: int


def guideline_check(trace: TrainTrace, horizon: int = 20) -> GuidelineVerdict:
    """Early-training progress check over the first ``horizon`` epochs.

    Passes when, relative to epoch 1, (a) the validation loss halves at
    some epoch in 2..horizon and (b) the mean absolute gradient at least
    doubles at some epoch in 2..horizon. The horizon is capped at the
    trace length; traces shorter than two epochs raise.
    """
    n = trace.n_epochs
    if n < 2:
        raise InsufficientEpochsError("guideline needs at least 2 epochs")
    upto = min(horizon, n)
    v0 = trace.val_loss[0]
    g0 = trace.mean_abs_grad[0]
    if v0 > 0.0:
        min_loss_ratio = min(v / v0 for v in trace.val_loss[1:upto])
    else:
        min_loss_ratio = np.inf
    if g0 > 0.0:
        max_grad_ratio = max(g / g0 for g in trace.mean_abs_grad[1:upto])
    else:
        max_grad_ratio = 0.0
    loss_ok = bool(min_loss_ratio <= 0.5)
    grad_ok = bool(max_grad_ratio >= 2.0)
    return GuidelineVerdict(
        ok=loss_ok and grad_ok,
        loss_ok=loss_ok,
        grad_ok=grad_ok,
        min_loss_ratio=float(min_loss_ratio),
        max_grad_ratio=float(max_grad_ratio),
        epochs_considered=upto,
    )
