"""Scoring functions for decoded predictions and the evaluation report."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ZeroTrueValueError
from .validation import as_float_array, as_index_array, check_nonempty, check_same_length


def accuracy(true_classes, pred_classes) -> float:
    t = as_index_array(true_classes, "true_classes")
    p = as_index_array(pred_classes, "pred_classes")
    check_same_length(t, p, "true_classes and pred_classes")
    check_nonempty(t, "true_classes")
    return float(np.mean(t == p))


def mse(true_vals, pred_vals) -> float:
    t = as_float_array(true_vals, "true_vals")
    p = as_float_array(pred_vals, "pred_vals")
    check_same_length(t, p, "true_vals and pred_vals")
    check_nonempty(t, "true_vals")
    return float(np.mean((p - t) ** 2))


def mae(true_vals, pred_vals) -> float:
    t = as_float_array(true_vals, "true_vals")
    p = as_float_array(pred_vals, "pred_vals")
    check_same_length(t, p, "true_vals and pred_vals")
    check_nonempty(t, "true_vals")
    return float(np.mean(np.abs(p - t)))


def mape(true_vals, pred_vals) -> float:
    """Mean absolute percentage error as a fraction (0.02 == 2%).

    Undefined (raises) when any true value is zero; no epsilon smoothing
    is applied so the headline metric is never silently distorted.
    """
    t = as_float_array(true_vals, "true_vals")
    p = as_float_array(pred_vals, "pred_vals")
    check_same_length(t, p, "true_vals and pred_vals")
    check_nonempty(t, "true_vals")
    if np.any(t == 0.0):
        raise ZeroTrueValueError(
            f"MAPE undefined: zero true value at positions "
            f"{np.flatnonzero(t == 0.0)[:10].tolist()}"
        )
    return float(np.mean(np.abs(p - t) / np.abs(t)))


@dataclass
class EvalReport:
    """Metrics for one experiment run.

    ``mape`` is stored as a fraction; presentation layers render percent.
    Wall-clock fields are optional and excluded from determinism checks.
    """

    model: str
    accuracy: float
    mse: float
    mae: float
    mape: float
    n_samples: int
    n_clamped: int = 0
    n_extended_encodings: int = 0
    wall_train_ms: Optional[float] = None
    wall_infer_ms: Optional[float] = None
    train_trace: Optional[dict] = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy must be in [0, 1], got {self.accuracy}")
        if self.mse < 0.0 or self.mape < 0.0:
            raise ValueError("mse and mape must be non-negative")
        if self.n_clamped > self.n_samples:
            raise ValueError("n_clamped cannot exceed n_samples")

    def to_json_dict(self, include_wall: bool = True) -> dict:
        doc = {
            "model": self.model,
            "accuracy_fraction": self.accuracy,
            "mse_raw": self.mse,
            "mae_raw": self.mae,
            "mape_fraction": self.mape,
            "n_samples": self.n_samples,
            "n_clamped": self.n_clamped,
            "n_extended_encodings": self.n_extended_encodings,
            "train_trace": self.train_trace,
        }
        if include_wall:
            doc["wall_train_ms"] = self.wall_train_ms
            doc["wall_infer_ms"] = self.wall_infer_ms
        return doc
