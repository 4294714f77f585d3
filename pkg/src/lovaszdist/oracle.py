"""Independent reference computations: seeded Monte Carlo and brute-force sums.

Random numbers come from numpy's ``Philox`` (Philox4x64-10), a counter-based
generator.  Samples are drawn in fixed blocks of ``BLOCK`` points; block
``j`` is keyed by ``SeedSequence(seed, spawn_key=(j,))``, so the output
depends only on ``(seed, count)`` and never on how blocks are scheduled.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import permutations
from math import comb, factorial

import numpy as np

from .capacity import Capacity, knot_profile, popcount
from .distribution import cdf, cdf_piecewise, eval_piecewise_cdf, point_masses
from .lovasz import eval_sorted

BLOCK = 1 << 16
MAX_SAMPLES = 10**8
KS_COEFF = 1.95


@dataclass(frozen=True)
class SampleBatch:
    seed: int
    count: int
    values: np.ndarray  # sorted ascending

    def mean(self) -> float:
        return float(self.values.mean())


def _block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _sample_block(v: Capacity, seed: int, block: int, size: int) -> np.ndarray:
    pts = _block_generator(seed, block).random((size, v.n))
    return eval_sorted(v, pts)


def sample(v: Capacity, count: int, seed: int, threads: int | None = None) -> SampleBatch:
    """``count`` realizations of ``h(X)``, ``X`` uniform on the cube, sorted."""
    if not 0 <= count <= MAX_SAMPLES:
        raise ValueError(f"count must be in 0..{MAX_SAMPLES}")
    sizes = [min(BLOCK, count - start) for start in range(0, count, BLOCK)]

    def work(j):
        return _sample_block(v, seed, j, sizes[j])

    if threads and threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(j) for j in range(len(sizes))]
    values = np.sort(np.concatenate(parts)) if parts else np.empty(0)
    return SampleBatch(seed, count, values)


def ks_statistic(batch: SampleBatch, v: Capacity, method: str = "piecewise") -> float:
    """Two-sided Kolmogorov-Smirnov distance between the batch and the exact CDF.

    ``sup_y |F_N(y) - F(y)|``, checked at and just below every distinct
    sample value and at every atom of ``Y``; for a continuous ``F`` this is
    the usual ``max(i/N - F(x_i), F(x_i) - (i-1)/N)``.

    ``method="direct"`` evaluates the permutation sum at every sample;
    ``"piecewise"`` evaluates the same CDF through its polynomial pieces.
    """
    if batch.values.size == 0:
        raise ValueError("KS statistic is undefined for an empty batch")
    atom_at, atom_mass = point_masses(v)
    x = np.union1d(batch.values, atom_at)
    N = batch.values.size
    if method == "direct":
        F = np.asarray(cdf(v, x))
    elif method == "piecewise":
        F = eval_piecewise_cdf(cdf_piecewise(v), x)
    else:
        raise ValueError(f"unknown method {method!r}")
    F_left = F.copy()
    hit = np.searchsorted(x, atom_at)
    F_left[hit] -= atom_mass
    Fn = np.searchsorted(batch.values, x, side="right") / N
    Fn_left = np.searchsorted(batch.values, x, side="left") / N
    return float(max(np.max(np.abs(Fn - F)), np.max(np.abs(Fn_left - F_left))))


def ks_threshold(count: int) -> float:
    """Kolmogorov critical value at the 99.9% level, ``1.95 / sqrt(N)``."""
    return KS_COEFF / np.sqrt(count)


def brute_chain_moment(v: Capacity, r: int) -> float:
    """``E[Y^r]`` by literally enumerating every nested tuple ``[n] >= A_1 >= ... >= A_r``."""
    if v.n > 4 or not 1 <= r <= 3:
        raise ValueError("brute-force chain sum is limited to n <= 4, r <= 3")
    sizes = popcount(np.arange(1 << v.n))
    vals = v.values

    def walk(parent: int, depth: int) -> float:
        if depth == r:
            return 1.0
        total = 0.0
        for child in range(1 << v.n):
            if child & ~parent:
                continue
            weight = vals[child] / comb(int(sizes[parent]), int(sizes[child]))
            total += weight * walk(child, depth + 1)
        return total

    return walk((1 << v.n) - 1, 0) / comb(v.n + r, r)


def quotient_sum(v: Capacity, y, side: str = "plus"):
    """``(1/n!) sum_sigma [h^sigma] (. - y)^n_{+/-}`` from the explicit quotient formula.

    Valid only when every knot profile has pairwise distinct entries.  The
    formula subtracts large terms, so it is evaluated in ``np.longdouble``;
    used to cross-check the tableau, never in production.
    """
    if v.n > 7:
        raise ValueError("explicit quotient sum is limited to n <= 7")
    profiles = []
    for sigma in permutations(range(1, v.n + 1)):
        knots = knot_profile(v, sigma)
        if np.unique(knots).size != knots.size:
            raise ValueError(f"knot profile for {sigma} has repeated values")
        profiles.append(knots)
    k = np.array(profiles, dtype=np.longdouble)  # (n!, n+1)
    diffs = k[:, :, None] - k[:, None, :]
    diffs[:, np.arange(v.n + 1), np.arange(v.n + 1)] = 1.0
    inv_w = 1.0 / np.prod(diffs, axis=2)
    ys = np.atleast_1d(np.asarray(y, dtype=np.longdouble))
    out = np.empty(ys.size)
    for i, yi in enumerate(ys):
        t = k - yi
        mask = t > 0 if side == "plus" else t < 0
        out[i] = np.sum(np.where(mask, t ** v.n, 0.0) * inv_w) / factorial(v.n)
    return float(out[0]) if np.ndim(y) == 0 else out


def cdf_distinct_knots(v: Capacity, y, side: str = "plus"):
    """CDF from :func:`quotient_sum` in the plus or minus form."""
    total = quotient_sum(v, y, side)
    return 1.0 - total if side == "plus" else total


def random_capacity(n: int, rng: np.random.Generator, low: float = -1.0, high: float = 1.0) -> Capacity:
    """Entries uniform in ``[low, high]`` with ``v(empty) = 0``."""
    vals = rng.uniform(low, high, 1 << n)
    vals[0] = 0.0
    return Capacity(n, vals)


def random_monotone_capacity(n: int, rng: np.random.Generator) -> Capacity:
    """Normalized monotone capacity: running max over subsets of uniform draws, scaled to ``v(full) = 1``."""
    vals = rng.uniform(0.0, 1.0, 1 << n)
    vals[0] = 0.0
    masks = np.arange(1 << n)
    # subset-max transform, one sweep per bit like the zeta transform
    for i in range(n):
        hi = masks[(masks >> i & 1) == 1]
        vals[hi] = np.maximum(vals[hi], vals[hi ^ (1 << i)])
    vals /= vals[-1]
    return Capacity(n, vals)
