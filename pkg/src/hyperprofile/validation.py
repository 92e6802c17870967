"""Input validation helpers used across the public API."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import ValidationError


def require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def require_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite real, got {value!r}")
    return value


def require_nonnegative(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ValidationError(f"{name} must be a nonnegative finite real, got {value!r}")
    return value


def as_float_array(values: Iterable[float] | np.ndarray, name: str, *, ndim: int | None = None) -> np.ndarray:
    """Coerce to a float64 array, rejecting NaN and infinity."""
    arr = np.asarray(values, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValidationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def as_xy_pairs(points: Iterable[tuple[float, float]], name: str) -> tuple[np.ndarray, np.ndarray]:
    """Split an iterable of (x, y) pairs into two float arrays."""
    arr = as_float_array(list(points), name)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError(f"{name} must be a sequence of (x, y) pairs")
    return arr[:, 0], arr[:, 1]
