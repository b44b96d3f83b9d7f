"""Hard-parameter-sharing two-head baseline with equal loss weighting.

A shared affine-ReLU stack feeds a classification head (n outputs, softmax
cross-entropy) and a regression head (1 output, MSE on raw property
values). Total loss is the 1:1 weighted sum, the usual starting point for
multi-task benchmarking; adjusting the weights exposes the scale-mismatch
failure mode that plagues joint classification/regression training.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .data import LabeledDataset, SplitAssignment
from .errors import DimMismatchError
from .metrics import EvalReport, accuracy, mae, mape, mse
from .nets import (
    FeedForwardNet,
    TrainConfig,
    TrainTrace,
    cross_entropy_loss,
    mse_loss,
    train,
)

BASELINE_TAG = "baseline-hps-ew"


@dataclass
class BaselineResult:
    report: EvalReport
    net: FeedForwardNet
    trace: Optional[TrainTrace]


def baseline_net(feature_dim: int, n_classes: int,
                 hidden_widths: Sequence[int] = (64, 64), seed: int = 0) -> FeedForwardNet:
    return FeedForwardNet((feature_dim, *hidden_widths), (n_classes, 1), seed=seed)


def predict_baseline(net: FeedForwardNet, features):
    """(pred_classes, pred_properties) from the two heads."""
    logits, reg = net.forward(features)
    return np.argmax(logits, axis=1) + 1, reg[:, 0]


def run_baseline(
    dataset: LabeledDataset,
    splits: SplitAssignment,
    train_config: TrainConfig,
    *,
    hidden_widths: Sequence[int] = (64, 64),
    class_weight: float = 1.0,
    reg_weight: float = 1.0,
) -> BaselineResult:
    """Train the shared-stack two-head model and score it with the same
    metrics as the consolidated pipeline. Regression targets are raw
    property values; no label codec is involved."""
    if dataset.feature_dim == 0:
        raise DimMismatchError("training requires feature_dim > 0")
    net = baseline_net(
        dataset.feature_dim, dataset.n_classes, hidden_widths, seed=train_config.seed
    )
    cls0 = dataset.class_indices - 1
    props = dataset.properties
    t0 = time.perf_counter()
    trace = train(
        net,
        dataset.features[splits.train],
        (cls0[splits.train], props[splits.train]),
        dataset.features[splits.val],
        (cls0[splits.val], props[splits.val]),
        train_config,
        losses=(cross_entropy_loss, mse_loss),
        loss_weights=(class_weight, reg_weight),
    )
    wall_train_ms = (time.perf_counter() - t0) * 1e3

    X_test = dataset.features[splits.test]
    t0 = time.perf_counter()
    pred_cls, pred_props = predict_baseline(net, X_test)
    wall_infer_ms = (time.perf_counter() - t0) * 1e3 / max(len(X_test), 1)

    true_cls = dataset.class_indices[splits.test]
    true_props = props[splits.test]
    report = EvalReport(
        model=BASELINE_TAG,
        accuracy=accuracy(true_cls, pred_cls),
        mse=mse(true_props, pred_props),
        mae=mae(true_props, pred_props),
        mape=mape(true_props, pred_props),
        n_samples=len(X_test),
        n_clamped=0,
        wall_train_ms=wall_train_ms,
        wall_infer_ms=wall_infer_ms,
        train_trace=trace.to_json_dict(),
    )
    return BaselineResult(report, net, trace)
