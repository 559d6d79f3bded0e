"""Shared argument checking and error types.

Error taxonomy used across the package and mapped to CLI exit codes:
``DataError`` for malformed or inconsistent inputs (exit 3) and
``DivergenceError`` for non-finite numerics during iteration (exit 4).
"""

from __future__ import annotations

import numpy as np


class DataError(ValueError):
    """Malformed file, incompatible shape, or invalid label data."""


class DivergenceError(ArithmeticError):
    """Non-finite values encountered during iterative updates."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


def as_matrix(x, name="array", dtype=None):
    """Coerce to a 2-D ndarray, rejecting empty or non-finite input."""
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim != 2:
        raise DataError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        bad = np.flatnonzero(~np.isfinite(arr).all(axis=1))[0]
        raise DataError(f"{name} contains non-finite values (first bad row {bad})")
    return arr


def as_vector(x, length=None, name="vector", dtype=None):
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim != 1:
        raise DataError(f"{name} must be 1-D, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise DataError(f"{name} has length {arr.shape[0]}, expected {length}")
    return arr


def check_labels(labels, count, class_count, name="labels", require_all_classes=True):
    """Validate class ids: right length, in range, optionally every class populated."""
    arr = np.asarray(labels)
    if arr.ndim != 1 or arr.shape[0] != count:
        raise DataError(f"{name} must be a length-{count} vector, got shape {arr.shape}")
    arr = arr.astype(np.int64)
    if class_count < 1:
        raise DataError(f"class_count must be >= 1, got {class_count}")
    if arr.size and (arr.min() < 0 or arr.max() >= class_count):
        raise DataError(
            f"{name} out of range: values must lie in [0, {class_count}), "
            f"got min {arr.min()} max {arr.max()}"
        )
    if require_all_classes:
        present = np.unique(arr)
        if present.size != class_count:
            missing = np.setdiff1d(np.arange(class_count), present)[0]
            raise DataError(f"class {missing} has no atoms (class_count={class_count})")
    return arr
