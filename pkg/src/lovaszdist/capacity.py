"""Set functions on the power set of ``{1, ..., n}``.

Subsets are encoded as bitmask integers: player ``i`` (1-based) is bit
``i - 1``, so ``0`` is the empty set and ``2**n - 1`` is the full set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

MAX_PLAYERS = 20
EQ_TOL = 1e-12


class CapacityError(ValueError):
    """Base class for invalid capacity input."""


class CapacityParseError(CapacityError):
    """Malformed capacity file (bad JSON, bad key, duplicate subset)."""


class CompletenessError(CapacityError):
    """Some nonempty subset has no value."""


class GroundingError(CapacityError):
    """The empty set carries a nonzero value."""


def popcount(masks):
    """Number of set bits, elementwise for arrays."""
    masks = np.asarray(masks, dtype=np.int64)
    counts = np.zeros(masks.shape, dtype=np.int64)
    for bit in range(MAX_PLAYERS + 1):
        counts += (masks >> bit) & 1
    return counts


def subset_key(mask: int) -> str:
    """Format a bitmask as the file key, e.g. ``0b101 -> "1,3"``."""
    return ",".join(str(i + 1) for i in range(mask.bit_length()) if mask >> i & 1)


def parse_subset_key(key: str, n: int) -> int:
    key = key.strip()
    if key == "":
        return 0
    try:
        players = [int(tok) for tok in key.split(",")]
    except ValueError:
        raise CapacityParseError(f"malformed subset key {key!r}") from None
    if any(b <= a for a, b in zip(players, players[1:])):
        raise CapacityParseError(f"subset key {key!r} is not strictly ascending")
    if players[0] < 1 or players[-1] > n:
        raise CapacityParseError(f"subset key {key!r} has a player outside 1..{n}")
    mask = 0
    for p in players:
        mask |= 1 << (p - 1)
    return mask


@dataclass(frozen=True, eq=False)
class Capacity:
    """A real set function ``v`` with ``v(empty) = 0``.

    ``values[mask]`` is the value of the subset encoded by ``mask``.  No
    monotonicity or normalization is assumed.
    """

    n: int
    values: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_PLAYERS:
            raise CapacityError(f"n must be in 1..{MAX_PLAYERS}, got {self.n}")
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (1 << self.n,):
            raise CompletenessError(
                f"expected {1 << self.n} values for n={self.n}, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise CapacityError("capacity values must be finite")
        if values[0] != 0.0:
            raise GroundingError(f"v(empty set) must be 0, got {values[0]}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[frozenset | tuple | int, float]):
        """Build from ``{subset: value}`` where a subset is a mask or an iterable of players."""
        values = np.full(1 << n, np.nan)
        values[0] = 0.0
        for subset, val in mapping.items():
            if isinstance(subset, (int, np.integer)):
                mask = int(subset)
            else:
                mask = 0
                for p in subset:
                    mask |= 1 << (p - 1)
            values[mask] = val
        missing = np.flatnonzero(np.isnan(values))
        if missing.size:
            raise CompletenessError(f"missing subsets: {[subset_key(int(m)) for m in missing[:5]]}")
        return cls(n, values)

    @classmethod
    def from_function(cls, n: int, func):
        """Build from ``func(frozenset_of_players) -> value``; ``func`` is not called on the empty set."""
        values = np.zeros(1 << n)
        for mask in range(1, 1 << n):
            values[mask] = func(frozenset(i + 1 for i in range(n) if mask >> i & 1))
        return cls(n, values)

    @classmethod
    def from_cardinality(cls, weights: Sequence[float]):
        """Cardinality-based capacity with ``v(A) = weights[|A|]``; ``weights[0]`` must be 0."""
        weights = np.asarray(weights, dtype=np.float64)
        n = len(weights) - 1
        return cls(n, weights[popcount(np.arange(1 << n))])

    @classmethod
    def additive(cls, weights: Sequence[float]):
        """``v(A) = sum of weights[i-1] over i in A``."""
        weights = np.asarray(weights, dtype=np.float64)
        n = len(weights)
        masks = np.arange(1 << n)
        bits = (masks[:, None] >> np.arange(n)) & 1
        return cls(n, bits @ weights)

    def __call__(self, subset) -> float:
        if isinstance(subset, (int, np.integer)):
            return float(self.values[subset])
        mask = 0
        for p in subset:
            mask |= 1 << (p - 1)
        return float(self.values[mask])

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def to_json(self) -> str:
        vals = {subset_key(m): float(self.values[m]) for m in range(1, 1 << self.n)}
        return json.dumps({"n": self.n, "values": vals}, indent=2)


@dataclass(frozen=True, eq=False)
class MoebiusRepresentation:
    """Coefficients of ``h(x) = sum_A coeffs[A] * min_{i in A} x_i``."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.float64)
        if coeffs.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} coefficients, got shape {coeffs.shape}")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True)
class Classification:
    is_monotone: bool
    is_lattice_polynomial: bool
    is_cardinality_based: bool
    is_additive: bool


def load_capacity(text: str) -> Capacity:
    """Parse the JSON capacity format.

    ``{"n": 3, "values": {"1": 0.1, "1,2": 0.9, ...}}``; every nonempty
    subset must be present, the empty set may appear as ``""`` with value 0.
    """
    def _no_duplicates(pairs):
        seen = {}
        for key, val in pairs:
            if key in seen:
                raise CapacityParseError(f"duplicate key {key!r}")
            seen[key] = val
        return seen

    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise CapacityParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "n" not in doc or "values" not in doc:
        raise CapacityParseError('expected an object with keys "n" and "values"')
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= MAX_PLAYERS:
        raise CapacityParseError(f'"n" must be an integer in 1..{MAX_PLAYERS}')
    raw = doc["values"]
    if not isinstance(raw, dict):
        raise CapacityParseError('"values" must be an object')

    values = np.full(1 << n, np.nan)
    for key, val in raw.items():
        mask = parse_subset_key(key, n)
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise CapacityParseError(f"value for {key!r} is not a number")
        if not np.isnan(values[mask]):
            # "1,2" and " 1,2" normalize to the same subset
            raise CapacityParseError(f"duplicate subset {subset_key(mask)!r}")
        values[mask] = float(val)
    if np.isnan(values[0]):
        values[0] = 0.0
    elif values[0] != 0.0:
        raise GroundingError(f"v(empty set) must be 0, got {values[0]}")
    missing = np.flatnonzero(np.isnan(values))
    if missing.size:
        keys = [subset_key(int(m)) for m in missing[:5]]
        raise CompletenessError(f"{missing.size} subset(s) missing, e.g. {keys}")
    return Capacity(n, values)


def read_capacity(path) -> Capacity:
    with open(path, encoding="utf-8") as fh:
        return load_capacity(fh.read())


def _subset_sum(arr: np.ndarray, n: int, sign: int) -> np.ndarray:
    """In-place fast zeta (sign=+1) or Moebius (sign=-1) transform along the last axis."""
    lead = arr.shape[:-1]
    for i in range(n):
        view = arr.reshape(*lead, 1 << (n - i - 1), 2, 1 << i)
        if sign > 0:
            view[..., 1, :] += view[..., 0, :]
        else:
            view[..., 1, :] -= view[..., 0, :]
    return arr


def zeta_transform(values: np.ndarray, n: int) -> np.ndarray:
    """``out[A] = sum_{B subset of A} values[B]`` over the last axis."""
    return _subset_sum(np.array(values, dtype=np.float64), n, +1)


def moebius_transform(v: Capacity) -> MoebiusRepresentation:
    """``m(A) = sum_{B subset of A} (-1)^(|A|-|B|) v(B)``, by the O(n 2^n) butterfly."""
    return MoebiusRepresentation(v.n, _subset_sum(v.values.copy(), v.n, -1))


def moebius_naive(v: Capacity) -> np.ndarray:
    """Direct alternating sum, O(3^n). Reference for small n."""
    n = v.n
    out = np.zeros(1 << n)
    for a in range(1 << n):
        sub = a
        total = 0.0
        while True:
            sign = -1.0 if (bin(a).count("1") - bin(sub).count("1")) % 2 else 1.0
            total += sign * v.values[sub]
            if sub == 0:
                break
            sub = (sub - 1) & a
        out[a] = total
    return out


def capacity_from_moebius(m: MoebiusRepresentation) -> Capacity:
    return Capacity(m.n, zeta_transform(m.coeffs, m.n))


def classify(v: Capacity, tol: float = EQ_TOL) -> Classification:
    """Flags for the special subclasses of Lovasz extensions.

    * lattice polynomial: monotone, {0,1}-valued (exact), ``v(full) = 1``
    * cardinality-based: a linear combination of order statistics
    * additive: a weighted sum
    """
    n, vals = v.n, v.values
    masks = np.arange(1 << n)

    # monotone iff every single-element extension does not decrease v
    monotone = True
    for i in range(n):
        lo = masks[(masks >> i & 1) == 0]
        if np.any(vals[lo | (1 << i)] < vals[lo] - tol):
            monotone = False
            break

    zero_one = bool(np.all((vals == 0.0) | (vals == 1.0)))
    lattice = monotone and zero_one and vals[-1] == 1.0

    sizes = popcount(masks)
    cardinality = True
    for k in range(1, n + 1):
        level = vals[sizes == k]
        if level.max() - level.min() > tol:
            cardinality = False
            break

    singletons = vals[1 << np.arange(n)]
    bits = (masks[:, None] >> np.arange(n)) & 1
    additive = bool(np.all(np.abs(bits @ singletons - vals) <= tol))

    return Classification(
        is_monotone=bool(monotone),
        is_lattice_polynomial=bool(lattice),
        is_cardinality_based=bool(cardinality),
        is_additive=additive,
    )


def check_permutation(sigma: Sequence[int], n: int) -> tuple[int, ...]:
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{n}")
    return sigma


def knot_profile(v: Capacity, sigma: Sequence[int]) -> np.ndarray:
    """Values of ``v`` along the chain ``{} < {s1} < {s1,s2} < ... < [n]``.

    ``sigma`` is 1-based.  Returns ``(h_0, ..., h_n)`` with ``h_0 = 0``.
    """
    sigma = check_permutation(sigma, v.n)
    out = np.empty(v.n + 1)
    mask = 0
    out[0] = v.values[0]
    for i, player in enumerate(sigma, start=1):
        mask |= 1 << (player - 1)
        out[i] = v.values[mask]
    return out


def chain_masks(n: int, block_prefix: tuple[int, ...] = ()) -> np.ndarray:
    """Bitmasks of all maximal chains, one row per permutation, in lexicographic order.

    Row ``p`` holds the masks ``(0, {s1}, {s1,s2}, ..., full)`` for the
    ``p``-th permutation (0-based players).  Each level extends the previous
    one by a single bit, so the chains share prefixes.  ``block_prefix``
    restricts to permutations starting with the given players.
    """
    rows = np.full((1, len(block_prefix) + 1), 0, dtype=np.int64)
    acc = 0
    for i, p in enumerate(block_prefix, start=1):
        acc |= 1 << p
        rows[0, i] = acc
    for _ in range(n - len(block_prefix)):
        last = rows[:, -1]
        free = [(last >> j & 1) == 0 for j in range(n)]
        # for each row, children in ascending order of the added player
        child_bits = np.stack([np.where(free[j], 1 << j, 0) for j in range(n)], axis=1)
        keep = child_bits != 0
        parent = np.repeat(np.arange(rows.shape[0]), keep.sum(axis=1))
        new_last = last[parent] | child_bits[keep]
        rows = np.column_stack([rows[parent], new_last])
    return rows


def all_subsets(n: int):
    """Yield every subset of ``1..n`` as a tuple, by size then lexicographically."""
    for k in range(n + 1):
        yield from combinations(range(1, n + 1), k)
