"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import math

import numpy as np


def require_positive(name: str, value: float, allow_inf: bool = False) -> float:
    """Return ``value`` if it is a positive real, else raise ValueError."""
    value = float(value)
    if math.isnan(value) or value <= 0.0:
        raise ValueError(f"{name} must be positive, got {value}")
    if not allow_inf and math.isinf(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def require_positive_int(name: str, value: int) -> int:
    if int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return int(value)


def as_float_array(x, name: str = "array") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_feature_matrix(Z, name: str = "Z") -> np.ndarray:
    """Coerce to a 2-D float matrix (a single vector becomes one row)."""
    Z = as_float_array(Z, name)
    if Z.ndim == 1:
        Z = Z[None, :]
    if Z.ndim != 2:
        raise ValueError(f"{name} must be a vector or a matrix, got ndim={Z.ndim}")
    return Z


def as_pm1_labels(y, name: str = "y") -> np.ndarray:
    """Coerce labels to {-1, +1}; 0/1 encodings are mapped to -1/+1."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    values = set(np.unique(y).tolist())
    if values <= {-1, 1}:
        return y.astype(int)
    if values <= {0, 1}:
        return (2 * y.astype(int)) - 1
    raise ValueError(f"{name} must take values in {{-1,+1}} or {{0,1}}, got {sorted(values)}")


def check_unit_box(Z, name: str = "Z") -> np.ndarray:
    """Require every entry in [-1, 1] (the sensitivity bound for feature noise)."""
    Z = np.asarray(Z, dtype=float)
    if Z.size and np.max(np.abs(Z)) > 1.0:
        worst = float(np.max(np.abs(Z)))
        raise ValueError(f"{name} has entries outside [-1, 1] (max |entry| = {worst})")
    return Z
