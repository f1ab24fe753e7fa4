"""Input validation helpers used by the estimator classes and frame ops."""

from __future__ import annotations

from .errors import GeometryMismatchError


def check_same_grid(a_shape, b_shape, what: str = "frames") -> None:
    if tuple(a_shape) != tuple(b_shape):
        raise GeometryMismatchError(
            f"{what} must share a pixel grid: {tuple(a_shape)} vs {tuple(b_shape)}"
        )


def check_odd_window(window: int) -> int:
    window = int(window)
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be an odd integer >= 3, got {window}")
    return window


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value}")
    return value
