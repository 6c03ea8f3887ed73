"""Robust 1-D line fitting for box extrapolation.

The loss is quadratic for residuals up to ``delta`` and linear beyond,
minimized by iteratively reweighted least squares: outliers get weight
``delta / |r|``, inliers weight 1. When every residual at the ordinary
least-squares solution is within ``delta`` the fit equals plain least
squares exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInput


def least_squares_fit(times, values) -> tuple[float, float]:
    """Ordinary least-squares line fit; returns (slope, intercept)."""
    t, v = _validate(times, values)
    design = np.stack([t, np.ones_like(t)], axis=1)
    params, *_ = np.linalg.lstsq(design, v, rcond=None)
    return float(params[0]), float(params[1])


def huber_fit(
    times,
    values,
    delta: float = 4.0,
    tol: float = 1e-9,
    max_iter: int = 50,
) -> tuple[float, float]:
    """Fit v = slope * t + intercept under the Huber loss.

    Args:
        times: Sample positions; at least two distinct values required.
        values: Observations, same length as ``times``.
        delta: Residual scale where the loss switches quadratic -> linear.
        tol: Stop when the largest parameter change falls below this.
        max_iter: Iteration cap.

    Returns:
        (slope, intercept).
    """
    t, v = _validate(times, values)
    design = np.stack([t, np.ones_like(t)], axis=1)
    params, *_ = np.linalg.lstsq(design, v, rcond=None)
    for _ in range(max_iter):
        residuals = v - design @ params
        abs_r = np.abs(residuals)
        weights = np.where(abs_r <= delta, 1.0, delta / np.maximum(abs_r, 1e-300))
        sqrt_w = np.sqrt(weights)
        new_params, *_ = np.linalg.lstsq(
            design * sqrt_w[:, None], v * sqrt_w, rcond=None
        )
        change = float(np.max(np.abs(new_params - params)))
        params = new_params
        if change < tol:
            break
    return float(params[0]), float(params[1])


def _validate(times, values) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1:
        raise DegenerateInput(f"bad sample shapes {t.shape} vs {v.shape}")
    if t.size < 2:
        raise DegenerateInput(f"need at least 2 samples, got {t.size}")
    if np.all(t == t[0]):
        raise DegenerateInput("all sample positions identical")
    return t, v
