"""Divided differences of truncated powers, polynomials and B-splines.

Truncated powers follow the strict convention: ``x^m_+ = x^m`` for
``x > 0`` and ``x^m_- = x^m`` for ``x < 0``, zero otherwise, so that
``x^m_+ + x^m_- = x^m`` away from the origin.

The workhorse is the de Boor / Varsi tableau.  Knots are split at ``y``
into ``b`` (knots strictly below ``y``) and ``c`` (knots ``>= y``), and

    alpha[k, l] = ((c_l - y) alpha[k-1, l] + (y - b_k) alpha[k, l-1]) / (c_l - b_k)

is filled row by row.  Every denominator is strictly positive, so repeated
knots need no special casing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial


def _as_knots(knots, min_len: int = 1) -> np.ndarray:
    knots = np.asarray(knots, dtype=np.float64)
    if knots.ndim != 1 or knots.size < min_len:
        raise ValueError(f"need a 1-d knot vector with at least {min_len} entries")
    if not np.all(np.isfinite(knots)):
        raise ValueError("knots must be finite")
    return knots


# ---------------------------------------------------------------------------
# reference divided differences

def divdiff_recursive(g: Callable | Polynomial, knots) -> float:
    """Classical recursive divided difference ``[a_0, ..., a_n] g``.

    Coincident knots are only supported when ``g`` is a
    :class:`numpy.polynomial.Polynomial`; the derivative branch then uses
    ``g^(m)(a) / m!`` for a run of ``m + 1`` equal knots.
    """
    a = np.sort(_as_knots(knots))
    is_poly = isinstance(g, Polynomial)

    @lru_cache(maxsize=None)
    def rec(lo: int, hi: int) -> float:
        if a[lo] == a[hi]:
            m = hi - lo
            if m == 0:
                return float(g(a[lo]))
            if not is_poly:
                raise ValueError("coincident knots require a polynomial g")
            return float(g.deriv(m)(a[lo])) / factorial(m)
        return (rec(lo + 1, hi) - rec(lo, hi - 1)) / (a[hi] - a[lo])

    return rec(0, a.size - 1)


def divdiff_distinct(g: Callable, knots) -> float:
    """Explicit quotient sum ``sum_i g(a_i) / prod_{j != i} (a_i - a_j)``.

    Only valid for pairwise distinct knots; cancellation-prone when knots
    cluster.
    """
    a = _as_knots(knots)
    if np.unique(a).size != a.size:
        raise ValueError("knots must be pairwise distinct")
    diffs = a[:, None] - a[None, :]
    np.fill_diagonal(diffs, 1.0)
    vals = np.array([g(t) for t in a], dtype=np.float64)
    return float(np.sum(vals / np.prod(diffs, axis=1)))


def truncated_power(x, degree: int, side: str = "plus"):
    """``x^degree_+`` or ``x^degree_-`` with the strict convention at 0."""
    x = np.asarray(x, dtype=np.float64)
    mask = x > 0 if side == "plus" else x < 0
    return np.where(mask, x ** degree, 0.0)


# ---------------------------------------------------------------------------
# polynomial divided differences

def complete_homogeneous_table(knots: np.ndarray, r: int) -> np.ndarray:
    """Complete homogeneous symmetric polynomials ``h_0..h_r`` over the last axis.

    One pass over the knots: ``h_j <- h_j + a * h_{j-1}`` for ``j = 1..r``.
    Output has shape ``(r + 1,) + knots.shape[:-1]``.
    """
    knots = np.asarray(knots, dtype=np.float64)
    h = np.zeros((r + 1,) + knots.shape[:-1])
    h[0] = 1.0
    for i in range(knots.shape[-1]):
        a = knots[..., i]
        for j in range(1, r + 1):
            h[j] = h[j] + a * h[j - 1]
    return h


def complete_homogeneous(knots: np.ndarray, r: int) -> np.ndarray:
    return complete_homogeneous_table(knots, r)[r]


def divdiff_power_sym(degree: int, knots) -> float:
    """``[a_0, ..., a_n] x^degree``: zero below degree ``n``, otherwise ``h_{degree-n}(a)``."""
    a = _as_knots(knots)
    r = degree - (a.size - 1)
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if r < 0:
        return 0.0
    return float(complete_homogeneous(a, r))


# ---------------------------------------------------------------------------
# Varsi tableau

_VARIANTS = ("plus", "minus", "plus_high")


def _tableau(y, bT, cT, variants: tuple[str, ...], keep: bool = False):
    """Run the recurrence for a batch of problems sharing ``r`` and ``s``.

    ``y`` has shape ``(G,)``; ``bT`` ``(r, G)`` and ``cT`` ``(s, G)`` hold the
    knots below and at-or-above ``y`` column-wise.  Each variant picks its
    initial values:

    * ``plus``  -- ``[.] (x - y)^(r+s-2)_+``, corner ``1 / (c_1 - b_1)``
    * ``minus`` -- ``[.] (x - y)^(r+s-1)_-``, first column 1, first row 0
    * ``plus_high`` -- ``[.] (x - y)^(r+s-1)_+``, first row 1, first column 0

    All variants share the denominators and run in one pass.  Returns the
    final entries ``(V, G)``, or the whole ``(V, r+1, s+1, G)`` grid when
    ``keep`` is set.
    """
    r, G = bT.shape
    s = cT.shape[0]
    V = len(variants)
    first_col = np.array([1.0 if v == "minus" else 0.0 for v in variants])[:, None]
    corner = [i for i, v in enumerate(variants) if v == "plus"]
    prev = np.zeros((V, s + 1, G))
    for i, v in enumerate(variants):
        if v == "plus_high":
            prev[i, 1:] = 1.0
    grid = [prev] if keep else None
    c_minus_y = cT - y
    den = np.empty(G)
    tmp = np.empty((V, G))
    for k in range(r):
        bk = bT[k]
        y_minus_b = y - bk
        cur = np.empty((V, s + 1, G))
        cur[:, 0] = first_col
        for l in range(1, s + 1):
            np.subtract(cT[l - 1], bk, out=den)
            cell = cur[:, l]
            np.multiply(c_minus_y[l - 1], prev[:, l], out=cell)
            np.multiply(y_minus_b, cur[:, l - 1], out=tmp)
            cell += tmp
            cell /= den
            if k == 0 and l == 1 and corner:
                cur[corner, 1] = 1.0 / den
        prev = cur
        if keep:
            grid.append(cur)
    if keep:
        return np.stack(grid, axis=1)
    return prev[:, s]


def _boundary(variant: str, r: int, s: int) -> float:
    """Value when every knot lies on one side of ``y`` (``r == 0`` or ``s == 0``)."""
    if variant == "plus":
        return 0.0
    if variant == "plus_high":
        return 1.0 if r == 0 else 0.0
    return 1.0 if s == 0 else 0.0


def _check_variants(variants) -> tuple[str, ...]:
    variants = (variants,) if isinstance(variants, str) else tuple(variants)
    for v in variants:
        if v not in _VARIANTS:
            raise ValueError(f"unknown variant {v!r}")
    return variants


def truncated_divdiff_batch(y, sorted_knots, variant) -> np.ndarray:
    """Divided differences of truncated powers for many ``(y, knots)`` pairs.

    ``sorted_knots`` has shape ``(G, p)`` with each row ascending; ``y`` has
    shape ``(G,)``.  The degree is ``p - 2`` for ``plus`` and ``p - 1`` for
    ``minus`` / ``plus_high``.  ``variant`` may be a tuple, in which case the
    result has a leading axis, one entry per variant.
    """
    single = isinstance(variant, str)
    variants = _check_variants(variant)
    y = np.asarray(y, dtype=np.float64)
    knotsT = np.ascontiguousarray(np.asarray(sorted_knots, dtype=np.float64).T)
    p, G = knotsT.shape
    split = np.sum(knotsT < y, axis=0)
    out = np.empty((len(variants), G))
    for r in range(p + 1):
        idx = np.flatnonzero(split == r)
        if idx.size == 0:
            continue
        if r == 0 or r == p:
            for i, v in enumerate(variants):
                out[i, idx] = _boundary(v, r, p - r)
            continue
        sub = knotsT[:, idx]
        out[:, idx] = _tableau(y[idx], sub[:r], sub[r:], variants)
    return out[0] if single else out


def truncated_divdiff_outer(ys, sorted_rows, variants) -> np.ndarray:
    """Every combination of ``ys`` (shape ``(M,)``) with knot rows (shape ``(U, p)``).

    Returns shape ``(V, M, U)``.  Avoids materializing the ``M * U`` knot
    copies: pairs are grouped by split index and gathered column-wise.
    """
    variants = _check_variants(variants)
    ys = np.asarray(ys, dtype=np.float64)
    rowsT = np.ascontiguousarray(np.asarray(sorted_rows, dtype=np.float64).T)
    p, U = rowsT.shape
    M = ys.size
    split = np.zeros((M, U), dtype=np.int64)
    for j in range(p):
        split += rowsT[j][None, :] < ys[:, None]
    split = split.ravel()
    out = np.empty((len(variants), M * U))
    for r in range(p + 1):
        idx = np.flatnonzero(split == r)
        if idx.size == 0:
            continue
        if r == 0 or r == p:
            for i, v in enumerate(variants):
                out[i, idx] = _boundary(v, r, p - r)
            continue
        mi, ui = np.divmod(idx, U)
        out[:, idx] = _tableau(ys[mi], rowsT[:r, ui], rowsT[r:, ui], variants)
    return out.reshape(len(variants), M, U)


@dataclass(frozen=True)
class VarsiTableau:
    """Full tableau for one evaluation.

    ``alpha[k, l]`` is the divided difference over ``b[:k]`` and ``c[:l]``.
    """

    y: float
    b: np.ndarray
    c: np.ndarray
    alpha: np.ndarray
    variant: str

    @property
    def r(self) -> int:
        return self.b.size

    @property
    def s(self) -> int:
        return self.c.size

    @property
    def value(self) -> float:
        if self.r == 0 or self.s == 0:
            return _boundary(self.variant, self.r, self.s)
        return float(self.alpha[self.r, self.s])


def varsi_tableau(y: float, knots, variant: str = "plus") -> VarsiTableau:
    """Build and keep the whole tableau for a single knot vector."""
    if variant not in _VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    a = np.sort(_as_knots(knots, min_len=2))
    y = float(y)
    b = a[a < y]
    c = a[a >= y]
    if b.size and c.size:
        alpha = _tableau(np.array([y]), b[:, None], c[:, None], (variant,), keep=True)[0, :, :, 0]
        if variant != "minus":
            assert np.all(alpha >= 0.0), "plus tableau produced a negative entry"
    else:
        alpha = np.zeros((b.size + 1, c.size + 1))
    return VarsiTableau(y, b, c, alpha, variant)


def varsi_plus(y: float, knots) -> float:
    """``[a_0, ..., a_n] (. - y)^(n-1)_+`` for ``n + 1`` knots."""
    return varsi_tableau(y, knots, "plus").value


def varsi_minus(y: float, knots) -> float:
    """``[a_0, ..., a_n] (. - y)^n_-`` for ``n + 1`` knots (note: degree ``n``)."""
    return varsi_tableau(y, knots, "minus").value


def varsi_plus_high(y: float, knots) -> float:
    """``[a_0, ..., a_n] (. - y)^n_+``, the plus counterpart of :func:`varsi_minus`."""
    return varsi_tableau(y, knots, "plus_high").value


def bspline(t: float, knots) -> float:
    """Normalized B-spline ``M(t | a_0..a_n) = n [a_0..a_n] (. - t)^(n-1)_+``.

    Nonnegative with unit integral.  At a jump (a knot of multiplicity
    ``n``) the value is the limit from the left.
    """
    a = _as_knots(knots, min_len=2)
    return (a.size - 1) * varsi_plus(t, a)
