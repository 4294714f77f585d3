"""Exact distribution of ``Y = h(X)`` for ``X`` uniform on the unit cube.

Every permutation ``sigma`` contributes one divided difference over its knot
profile ``(h_0, ..., h_n)``.  Divided differences are symmetric in their
knots, so profiles are sorted and deduplicated first and each distinct
multiset is weighted by its multiplicity.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import PPoly

from .capacity import Capacity, chain_masks, classify, popcount, zeta_transform
from .divdiff import (
    complete_homogeneous_table,
    truncated_divdiff_batch,
    truncated_divdiff_outer,
)

MAX_PERM_PLAYERS = 10
MAX_MOMENT_ORDER = 12
MAX_GRID_POINTS = 100_000
PDF_NOISE = 1e-9
# pairs (knot multiset, y) handled per vectorized batch
_BATCH_PAIRS = 1 << 20
# permutations are generated in blocks sharing a prefix of this many players
_BLOCK_FREE = 8


class PlayerCapError(ValueError):
    """Too many players for the permutation-sum route."""


@dataclass(frozen=True)
class KnotMultiset:
    """Distinct sorted knot profiles and how many permutations produce each.

    ``atoms`` marks profiles whose knots all coincide: on those simplices
    ``Y`` is constant, which puts a point mass of ``count / n!`` there.
    """

    n: int
    rows: np.ndarray
    counts: np.ndarray
    atoms: np.ndarray = field(repr=False)

    @property
    def atom_mass(self) -> float:
        return float(self.counts[self.atoms].sum()) / factorial(self.n)


@lru_cache(maxsize=32)
def _knot_multiset_cached(n: int, raw: bytes) -> KnotMultiset:
    values = np.frombuffer(raw, dtype=np.float64)
    free = min(n, _BLOCK_FREE)
    prefixes = _prefixes(n, n - free)
    parts, part_counts = [], []
    for prefix in prefixes:
        knots = np.sort(values[chain_masks(n, prefix)], axis=1)
        rows, counts = np.unique(knots, axis=0, return_counts=True)
        parts.append(rows)
        part_counts.append(counts)
    rows = np.concatenate(parts)
    counts = np.concatenate(part_counts)
    if len(parts) > 1:
        rows, inverse = np.unique(rows, axis=0, return_inverse=True)
        counts = np.bincount(inverse.ravel(), weights=counts).astype(np.int64)
    atoms = rows[:, 0] == rows[:, -1]
    for arr in (rows, counts, atoms):
        arr.flags.writeable = False
    return KnotMultiset(n, rows, counts, atoms)


def _prefixes(n: int, length: int) -> list[tuple[int, ...]]:
    if length == 0:
        return [()]
    out = []
    for head in _prefixes(n, length - 1):
        out.extend(head + (p,) for p in range(n) if p not in head)
    return out


def knot_multiset(v: Capacity) -> KnotMultiset:
    """Sorted knot profiles of all ``n!`` maximal chains, deduplicated."""
    if v.n > MAX_PERM_PLAYERS:
        raise PlayerCapError(
            f"n={v.n} exceeds the permutation-sum cap of {MAX_PERM_PLAYERS}"
        )
    return _knot_multiset_cached(v.n, v.values.tobytes())


def support(v: Capacity) -> tuple[float, float]:
    """Hull of all knots; every subset lies on some maximal chain."""
    return float(v.values.min()), float(v.values.max())


def point_masses(v: Capacity) -> tuple[np.ndarray, np.ndarray]:
    """Locations and probabilities of the atoms of ``Y`` (usually none).

    An atom sits wherever a whole simplex maps to a single value, i.e. a
    knot profile with all entries equal.
    """
    if classify(v).is_cardinality_based:
        knots = symmetric_knots(v)
        if np.ptp(knots) == 0.0:
            return np.array([knots[0]]), np.array([1.0])
        return np.empty(0), np.empty(0)
    ms = knot_multiset(v)
    levels = ms.rows[ms.atoms, 0]
    mass = ms.counts[ms.atoms] / factorial(v.n)
    uniq, inverse = np.unique(levels, return_inverse=True)
    return uniq, np.bincount(inverse.ravel(), weights=mass, minlength=uniq.size)


def symmetric_knots(v: Capacity) -> np.ndarray:
    """``(h_0, ..., h_n)`` of a cardinality-based capacity, read off the chain ``{1} < {1,2} < ...``."""
    return v.values[(1 << np.arange(v.n + 1)) - 1].copy()


# ---------------------------------------------------------------------------
# vectorized evaluation over many y

def _weighted_sums(rows, counts, ys, variants) -> np.ndarray:
    """``sum_u counts[u] * [rows[u]] (. - y)^d_{+/-}`` for every ``y``; shape ``(V, M)``."""
    U = rows.shape[0]
    out = np.empty((len(variants), ys.size))
    step = max(1, _BATCH_PAIRS // U)
    weights = counts.astype(np.float64)
    for start in range(0, ys.size, step):
        chunk = ys[start:start + step]
        vals = truncated_divdiff_outer(chunk, rows, variants)
        # row-wise reduction: each y is summed in the same order whatever the chunking
        out[:, start:start + step] = np.sum(vals * weights, axis=-1)
    return out


def _atom_correction(ms: KnotMultiset, ys: np.ndarray, variant: str) -> np.ndarray:
    """Replace the tableau value on constant simplices by the exact step."""
    if not ms.atoms.any():
        return np.zeros(ys.size)
    level = ms.rows[ms.atoms, 0]
    weight = ms.counts[ms.atoms].astype(np.float64)
    # on all-equal knots a the tableau gives [y <= a] (plus_high) and
    # [y > a] (minus); the exact steps are [y < a] and [y >= a]
    hit = (ys[:, None] == level[None, :]).astype(np.float64)
    sign = -1.0 if variant == "plus_high" else 1.0
    return sign * np.sum(hit * weight, axis=1)


def _parallel_map(func, ys: np.ndarray, threads: int | None) -> np.ndarray:
    if threads is None or threads <= 1 or ys.size < 2:
        return func(ys)
    pieces = np.array_split(ys, min(threads, ys.size))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(func, pieces)), axis=-1)


def _general(v: Capacity, ys: np.ndarray, want: tuple[str, ...], threads=None) -> np.ndarray:
    """Permutation-sum route; ``want`` lists any of ``cdf_plus``, ``cdf_minus``, ``pdf``."""
    ms = knot_multiset(v)
    nfact = float(factorial(v.n))
    scale = float(factorial(v.n - 1))
    variant_of = {"cdf_plus": "plus_high", "cdf_minus": "minus", "pdf": "plus"}
    variants = tuple(variant_of[w] for w in want)

    def run(part):
        totals = _weighted_sums(ms.rows, ms.counts, part, variants)
        out = np.empty_like(totals)
        for i, w in enumerate(want):
            if w == "pdf":
                out[i] = totals[i] / scale
                continue
            t = totals[i] + _atom_correction(ms, part, variants[i])
            out[i] = 1.0 - t / nfact if w == "cdf_plus" else t / nfact
        return out

    return _parallel_map(run, ys, threads)


def _general_cdf(v: Capacity, ys: np.ndarray, form: str = "plus", threads=None) -> np.ndarray:
    return _general(v, ys, ("cdf_" + form,), threads)[0]


def _general_pdf(v: Capacity, ys: np.ndarray, threads=None) -> np.ndarray:
    return _general(v, ys, ("pdf",), threads)[0]


def _symmetric_cdf(v: Capacity, ys: np.ndarray) -> np.ndarray:
    knots = np.sort(symmetric_knots(v))
    if knots[0] == knots[-1]:
        return (ys >= knots[0]).astype(np.float64)
    rows = np.tile(knots, (ys.size, 1))
    return truncated_divdiff_batch(ys, rows, "minus")


def _symmetric_pdf(v: Capacity, ys: np.ndarray) -> np.ndarray:
    knots = np.sort(symmetric_knots(v))
    rows = np.tile(knots, (ys.size, 1))
    return v.n * truncated_divdiff_batch(ys, rows, "plus")


def _clamp_cdf(vals):
    return np.clip(vals, 0.0, 1.0)


def _clamp_pdf(vals):
    return np.where(vals < 0.0, np.where(vals >= -PDF_NOISE, 0.0, vals), vals)


def _require_symmetric(v: Capacity):
    if not classify(v).is_cardinality_based:
        raise ValueError("capacity is not cardinality-based")


def _as_scalar_or_array(ys, out):
    return float(out[0]) if np.ndim(ys) == 0 else out.reshape(np.shape(ys))


# ---------------------------------------------------------------------------
# public API

def cdf(v: Capacity, y, threads: int | None = None):
    """``P(Y <= y)``.

    Uses the single-profile route for cardinality-based capacities (any
    ``n``), otherwise the sum over all ``n!`` permutations (``n <= 10``) with
    the plus truncated power.  ``y`` may be a scalar or an array.
    """
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel()
    if classify(v).is_cardinality_based:
        out = _symmetric_cdf(v, ys)
    else:
        out = _general_cdf(v, ys, "plus", threads)
    return _as_scalar_or_array(y, _clamp_cdf(out))


def cdf_minus(v: Capacity, y, threads: int | None = None):
    """``P(Y <= y)`` through the minus truncated power, always over all permutations."""
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel()
    return _as_scalar_or_array(y, _clamp_cdf(_general_cdf(v, ys, "minus", threads)))


def cdf_general(v: Capacity, y, threads: int | None = None):
    """Plus-form permutation sum without the symmetric shortcut."""
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel()
    return _as_scalar_or_array(y, _clamp_cdf(_general_cdf(v, ys, "plus", threads)))


def pdf(v: Capacity, y, threads: int | None = None):
    """Density of ``Y``: the average of the per-simplex B-splines.

    Where the density jumps (low-order or repeated knots) the returned value
    is the limit from the left.  Point masses are not represented.
    """
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel()
    if classify(v).is_cardinality_based:
        out = _symmetric_pdf(v, ys)
    else:
        out = _general_pdf(v, ys, threads)
    return _as_scalar_or_array(y, _clamp_pdf(out))


def pdf_general(v: Capacity, y, threads: int | None = None):
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel()
    return _as_scalar_or_array(y, _clamp_pdf(_general_pdf(v, ys, threads)))


def cdf_symmetric(v: Capacity, y):
    """CDF of a linear combination of order statistics from one divided difference."""
    _require_symmetric(v)
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel()
    return _as_scalar_or_array(y, _clamp_cdf(_symmetric_cdf(v, ys)))


def pdf_symmetric(v: Capacity, y):
    """Density of a linear combination of order statistics: a single B-spline."""
    _require_symmetric(v)
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel()
    return _as_scalar_or_array(y, _clamp_pdf(_symmetric_pdf(v, ys)))


def quantile(v: Capacity, p: float, tol: float = 1e-10) -> float:
    """Smallest ``y`` with ``cdf(y) >= p``, located by bisection to ``tol``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    lo, hi = support(v)
    if cdf(v, lo) >= p:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cdf(v, mid) >= p:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# moments

def raw_moment(v: Capacity, r: int) -> float:
    """``E[Y^r]`` from the nested-chain sum.

    ``F_0 = 1``, ``F_k(A) = sum_{B <= A} v(B) F_{k-1}(B) / C(|A|, |B|)`` and
    ``E[Y^r] = F_r(full) / C(n + r, r)``.  The inner subset sum is split by
    ``|B|`` so that each piece is a plain zeta transform, giving
    ``O(r n^2 2^n)`` work.
    """
    if not 1 <= r <= MAX_MOMENT_ORDER:
        raise ValueError(f"moment order must be in 1..{MAX_MOMENT_ORDER}")
    n = v.n
    masks = np.arange(1 << n)
    sizes = popcount(masks)
    inv_binom = np.array(
        [[1.0 / comb(a, j) if j <= a else 0.0 for j in range(n + 1)] for a in range(n + 1)]
    )
    F = np.ones(1 << n)
    for _ in range(r):
        weighted = v.values * F
        ranked = np.zeros((n + 1, 1 << n))
        ranked[sizes, masks] = weighted
        Z = zeta_transform(ranked, n)
        F = np.zeros(1 << n)
        for j in range(n + 1):
            F += Z[j] * inv_binom[sizes, j]
    return float(F[-1] / comb(n + r, r))


@dataclass(frozen=True)
class MomentTable:
    """Raw moments ``E[Y^r]`` and central moments ``E[(Y - mean)^r]`` for ``r = 1..R``.

    Arrays are indexed by ``r`` with index 0 holding the zeroth moment.
    """

    order: int
    raw: np.ndarray
    central: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.raw[1])

    @property
    def variance(self) -> float:
        return float(self.central[2]) if self.order >= 2 else float("nan")

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


def central_from_raw(raw: Sequence[float]) -> np.ndarray:
    """Binomial expansion ``E[(Y-mu)^r] = sum_j C(r,j) E[Y^j] (-mu)^(r-j)``."""
    raw = np.asarray(raw, dtype=np.float64)
    mu = raw[1] if raw.size > 1 else 0.0
    central = np.zeros_like(raw)
    for r in range(raw.size):
        central[r] = sum(comb(r, j) * raw[j] * (-mu) ** (r - j) for j in range(r + 1))
    if central.size > 1:
        central[1] = 0.0
    if central.size > 2 and central[2] < 0.0:
        # cancellation for (near) constant Y
        central[2] = 0.0
    return central


def moment_table(v: Capacity, R: int) -> MomentTable:
    if not 1 <= R <= MAX_MOMENT_ORDER:
        raise ValueError(f"moment order must be in 1..{MAX_MOMENT_ORDER}")
    raw = np.array([1.0] + [raw_moment(v, r) for r in range(1, R + 1)])
    return MomentTable(R, raw, central_from_raw(raw))


def expectation_functional(v: Capacity, g) -> float:
    """``sum_sigma [h_0^s, ..., h_n^s] g`` for a polynomial ``g``.

    By the permutation-sum identity this equals ``E[g^(n)(Y)]``.  ``g`` is a
    :class:`~numpy.polynomial.Polynomial` or its coefficients, lowest degree
    first.
    """
    coeffs = np.asarray(g.coef if isinstance(g, Polynomial) else g, dtype=np.float64)
    n = v.n
    ms = knot_multiset(v)
    top = coeffs.size - 1 - n
    if top < 0:
        return 0.0
    table = complete_homogeneous_table(ms.rows, top)  # (top+1, U)
    per_row = coeffs[n:] @ table
    return float(np.sum(per_row * ms.counts))


def moment_via_functional(v: Capacity, r: int) -> float:
    """``E[Y^r]`` with ``g(x) = r! x^(n+r) / (n+r)!``."""
    coeffs = np.zeros(v.n + r + 1)
    coeffs[-1] = factorial(r) / factorial(v.n + r)
    return expectation_functional(v, coeffs)


# ---------------------------------------------------------------------------
# grids

@dataclass(frozen=True)
class DistributionGrid:
    """CDF and density tabulated on an increasing grid.

    ``at_knot`` flags grid points that coincide with a knot, where the
    density may be one-sided.  ``atom_mass`` is the total probability of
    point masses; when positive the density does not integrate to one.
    """

    grid: np.ndarray
    cdf: np.ndarray
    pdf: np.ndarray
    at_knot: np.ndarray
    atom_mass: float = 0.0

    @property
    def degenerate(self) -> bool:
        return self.atom_mass > 0.0


def distribution_grid(
    v: Capacity, lo: float, hi: float, points: int, threads: int | None = None
) -> DistributionGrid:
    """CDF and density on ``points`` equally spaced values in ``[lo, hi]``."""
    if not 2 <= points <= MAX_GRID_POINTS:
        raise ValueError(f"points must be in 2..{MAX_GRID_POINTS}")
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError("need finite lo < hi")
    ys = np.linspace(lo, hi, points)
    symmetric = classify(v).is_cardinality_based
    if symmetric:
        knots = symmetric_knots(v)
        F = _symmetric_cdf(v, ys)
        f = _symmetric_pdf(v, ys)
        atom_mass = 1.0 if np.ptp(knots) == 0.0 else 0.0
        all_knots = knots
    else:
        ms = knot_multiset(v)
        F, f = _general(v, ys, ("cdf_plus", "pdf"), threads)
        atom_mass = ms.atom_mass
        all_knots = np.unique(ms.rows)
    at_knot = np.isin(ys, all_knots)
    return DistributionGrid(ys, _clamp_cdf(F), _clamp_pdf(f), at_knot, atom_mass)


def cdf_piecewise(v: Capacity) -> PPoly:
    """The CDF as a piecewise polynomial on the hull of the knots.

    Between consecutive distinct knot values the CDF is a polynomial of
    degree ``n``; each piece is recovered exactly (up to rounding) by
    interpolating ``n + 1`` Chebyshev samples of :func:`cdf`.  Evaluate with
    :func:`eval_piecewise_cdf`, which handles the outside of the hull.
    """
    if classify(v).is_cardinality_based:
        breaks = np.unique(symmetric_knots(v))
    else:
        breaks = np.unique(knot_multiset(v).rows)
    if breaks.size == 1:
        # constant Y: a single unit step, no polynomial pieces
        return PPoly(np.ones((1, 1)), np.array([breaks[0], breaks[0] + 1.0]))
    deg = v.n
    m = deg + 1
    # Chebyshev points of the first kind on [0, 1]
    nodes = 0.5 - 0.5 * np.cos((2 * np.arange(m) + 1) * np.pi / (2 * m))
    widths = np.diff(breaks)
    ys = (breaks[:-1, None] + widths[:, None] * nodes[None, :]).ravel()
    vals = np.asarray(cdf(v, ys)).reshape(widths.size, m)
    vander = np.vander(nodes, m)  # columns t^deg .. t^0
    scaled = np.linalg.solve(vander, vals.T)  # (m, pieces) in the unit variable
    powers = np.arange(deg, -1, -1)[:, None]
    coeffs = scaled / widths[None, :] ** powers
    return PPoly(coeffs, breaks, extrapolate=False)


def eval_piecewise_cdf(pp: PPoly, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    lo, hi = pp.x[0], pp.x[-1]
    inside = pp(np.clip(y, lo, hi))
    out = np.where(y < lo, 0.0, np.where(y >= hi, 1.0, inside))
    return np.clip(np.nan_to_num(out, nan=1.0), 0.0, 1.0)
