"""Evaluation of a linear combination of lattice polynomials on the unit cube."""

from __future__ import annotations

import numpy as np

from .capacity import Capacity, MoebiusRepresentation

MOEBIUS_SKIP = 1e-15


def _check_points(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (n,):
        raise ValueError(f"expected points of dimension {n}, got shape {x.shape}")
    if np.any(np.isnan(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("coordinates must lie in [0, 1]")
    return x


def descending_order(x: np.ndarray) -> np.ndarray:
    """0-based permutation putting coordinates in descending order.

    Ties are broken by ascending original index.
    """
    return np.argsort(-x, axis=-1, kind="stable")


def eval_sorted(v: Capacity, x) -> float | np.ndarray:
    """Telescoping form ``sum_i (h_i - h_{i-1}) x_(sigma(i))`` on the simplex containing ``x``.

    Accepts a single point of shape ``(n,)`` or a batch ``(N, n)``.
    """
    x = _check_points(x, v.n)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    order = descending_order(pts)
    xs = np.take_along_axis(pts, order, axis=-1)
    masks = np.bitwise_or.accumulate(np.left_shift(1, order), axis=-1)
    knots = v.values[masks]
    increments = np.diff(knots, axis=-1, prepend=0.0)
    out = np.sum(increments * xs, axis=-1)
    return float(out[0]) if single else out


def eval_moebius(m: MoebiusRepresentation, x) -> float | np.ndarray:
    """``sum_A m(A) * min_{i in A} x_i``, skipping negligible coefficients."""
    x = _check_points(x, m.n)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    out = np.zeros(pts.shape[0])
    for mask in np.flatnonzero(np.abs(m.coeffs) >= MOEBIUS_SKIP):
        members = [i for i in range(m.n) if mask >> i & 1]
        out += m.coeffs[mask] * pts[:, members].min(axis=1)
    return float(out[0]) if single else out
