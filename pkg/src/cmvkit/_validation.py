"""Input validation helpers (array coercion and domain checks)."""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError


def as_complex_vector(x, name: str = "input") -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ArgumentError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} contains non-finite values")
    return arr


def check_in_disk(x, name: str = "points", margin: float = 0.0) -> np.ndarray:
    """Coerce to a complex vector and require every modulus < 1 - margin."""
    arr = as_complex_vector(x, name)
    if arr.size and np.max(np.abs(arr)) >= 1.0 - margin:
        bad = arr[np.argmax(np.abs(arr))]
        raise ArgumentError(f"{name} must lie in the open unit disk; found |{bad}| = {abs(bad):.17g}")
    return arr


def check_unimodular(x, name: str = "value", atol: float = 1e-12) -> complex:
    z = complex(x)
    if not np.isfinite(z) or abs(abs(z) - 1.0) > atol:
        raise ArgumentError(f"{name} must be unimodular, got modulus {abs(z):.17g}")
    return z


def check_square(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ArgumentError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ArgumentError(f"{name} contains non-finite entries")
    return a


def circle_points(count: int) -> np.ndarray:
    """``count`` equispaced points on the unit circle starting at 1."""
    return np.exp(2j * np.pi * np.arange(count) / count)
