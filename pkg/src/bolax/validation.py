"""Input validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_finite_array(arr, name: str) -> np.ndarray:
    a = np.asarray(arr)
    if not np.all(np.isfinite(a.view(float) if np.iscomplexobj(a) else a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def check_in_open_unit_interval(value, name: str) -> float:
    v = float(value)
    if not (0.0 < v < 1.0):
        raise ValueError(f"{name} must lie in (0,1), got {value!r}")
    return v


def check_complex_matrix(x, name: str = "X") -> np.ndarray:
    """Coerce to a 2-d complex array with finite entries (row = one sample)."""
    a = np.asarray(x)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] < 1:
        raise ValueError(f"{name} must be a 1-d or 2-d array with at least one column")
    a = a.astype(complex)
    check_finite_array(a, name)
    return a
