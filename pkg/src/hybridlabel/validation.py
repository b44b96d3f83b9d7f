"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .errors import EmptyInputError, LengthMismatchError, NonFiniteInputError


def as_float_array(values, name: str = "values") -> np.ndarray:
    """Coerce to a 1-D float64 array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    return arr


def as_index_array(values, name: str = "indices") -> np.ndarray:
    """Coerce to a 1-D integer array, rejecting non-integral values."""
    arr = np.asarray(values)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.dtype.kind == "f":
        if not np.all(arr == np.floor(arr)):
            raise ValueError(f"{name} must hold integers")
    return arr.astype(np.int64)


def check_same_length(a, b, names: str = "inputs") -> None:
    if len(a) != len(b):
        raise LengthMismatchError(
            f"{names} must have equal lengths, got {len(a)} and {len(b)}"
        )


def check_nonempty(a, name: str = "input") -> None:
    if len(a) == 0:
        raise EmptyInputError(f"{name} must not be empty")


def check_finite(arr: np.ndarray, name: str = "values") -> None:
    if not np.all(np.isfinite(arr)):
        bad = np.flatnonzero(~np.isfinite(arr))
        raise NonFiniteInputError(
            f"{name} contains non-finite entries at positions {bad[:10].tolist()}"
        )
