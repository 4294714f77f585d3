import itertools
from fractions import Fraction

import numpy as np
import pytest
from numpy.polynomial import Polynomial
from scipy import integrate

from lovaszdist.divdiff import (
    bspline,
    complete_homogeneous,
    divdiff_distinct,
    divdiff_power_sym,
    divdiff_recursive,
    truncated_divdiff_batch,
    truncated_divdiff_outer,
    truncated_power,
    varsi_minus,
    varsi_plus,
    varsi_plus_high,
    varsi_tableau,
)


def plus_kernel(y, degree):
    return lambda x: float(truncated_power(x - y, degree, "plus"))


def exact_quotient(y, knots, degree, side):
    """Distinct-knot quotient sum in exact rational arithmetic."""
    a = [Fraction(float(t)) for t in knots]
    y = Fraction(float(y))
    total = Fraction(0)
    for i, ai in enumerate(a):
        t = ai - y
        if (t > 0 if side == "plus" else t < 0):
            den = Fraction(1)
            for j, aj in enumerate(a):
                if j != i:
                    den *= ai - aj
            total += t ** degree / den
    return float(total)


class TestRecursive:
    def test_slope(self):
        assert divdiff_recursive(lambda x: x * x, [0, 1]) == 1.0

    def test_monic_degree_n(self):
        assert divdiff_recursive(lambda x: x * x, [0, 1, 2]) == 1.0

    def test_cubic(self):
        # complete homogeneous h_1(0, 1, 2) = 3
        assert divdiff_recursive(lambda x: x ** 3, [0, 1, 2]) == pytest.approx(3.0)

    def test_coincident_needs_polynomial(self):
        with pytest.raises(ValueError):
            divdiff_recursive(lambda x: x ** 3, [0, 1, 1])

    def test_coincident_polynomial(self):
        # all knots equal: g^(3)(1) / 3! for g = x^3
        assert divdiff_recursive(Polynomial([0, 0, 0, 1]), [1, 1, 1, 1]) == pytest.approx(1.0)
        # x^4 over (0, 1, 1): h_2(0, 1, 1) = 0 + 1 + 1 + 0 + 0 + 1
        assert divdiff_recursive(Polynomial([0, 0, 0, 0, 1]), [0, 1, 1]) == pytest.approx(3.0)

    def test_distinct_formula_agrees(self, rng):
        for n in range(1, 7):
            a = rng.uniform(-1, 1, n + 1)
            assert divdiff_recursive(np.exp, a) == pytest.approx(divdiff_distinct(np.exp, a), rel=1e-8)

    def test_distinct_formula_rejects_repeats(self):
        with pytest.raises(ValueError):
            divdiff_distinct(np.exp, [0, 1, 1])


class TestPowerSym:
    def _brute(self, knots, r):
        return sum(np.prod(c) for c in itertools.combinations_with_replacement(knots, r))

    def test_sum_of_knots(self):
        assert divdiff_power_sym(3, [0, 1, 2]) == 3.0

    def test_empty_product(self):
        assert divdiff_power_sym(2, [0, 0.5, 1]) == 1.0

    def test_degree_four(self):
        assert divdiff_power_sym(4, [0, 0.5, 1]) == pytest.approx(1.75, abs=1e-15)
        assert self._brute([0, 0.5, 1], 2) == pytest.approx(1.75)

    def test_against_multiset_enumeration(self, rng):
        for n in range(0, 6):
            knots = rng.uniform(-1, 1, n + 1)
            for r in range(0, 5):
                assert divdiff_power_sym(n + r, knots) == pytest.approx(self._brute(knots, r), rel=1e-12, abs=1e-14)

    def test_annihilation(self, rng):
        knots = rng.uniform(-3, 3, 6)
        for d in range(5):
            assert divdiff_power_sym(d, knots) == 0.0
        assert divdiff_power_sym(5, knots) == 1.0

    def test_against_recursive(self, rng):
        knots = rng.uniform(-1, 1, 5)
        g = Polynomial([0] * 7 + [1])
        assert divdiff_power_sym(7, knots) == pytest.approx(divdiff_recursive(g, knots), rel=1e-9)

    def test_vectorized(self, rng):
        rows = rng.uniform(size=(4, 3))
        np.testing.assert_allclose(complete_homogeneous(rows, 2), [divdiff_power_sym(4, r) for r in rows])


class TestVarsiPlus:
    def test_tent_peak(self):
        assert varsi_plus(0.5, [0, 0.5, 1]) == 1.0

    def test_all_below(self):
        assert varsi_plus(2.0, [0, 0.5, 1]) == 0.0

    def test_all_above(self):
        assert varsi_plus(-1.0, [0, 0.5, 1]) == 0.0

    def test_repeated_knots(self):
        # one recursion step over the leading knot, then derivatives of the
        # polynomial (x - 0.3)^2, which is what the kernel equals on [0.3, inf)
        q = Polynomial([0.09, -0.6, 1.0])
        g = plus_kernel(0.3, 2)
        d_111 = divdiff_recursive(q, [1, 1, 1])
        d_011 = ((divdiff_recursive(q, [1, 1]) - (g(1.0) - g(0.0))) / 1.0)
        expected = (d_111 - d_011) / 1.0
        assert varsi_plus(0.3, [0, 1, 1, 1]) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.09)

    def test_repeated_knots_limit(self):
        eps = 1e-5
        approx = divdiff_distinct(plus_kernel(0.3, 2), [0, 1, 1 + eps, 1 + 2 * eps])
        assert varsi_plus(0.3, [0, 1, 1, 1]) == pytest.approx(approx, abs=1e-4)

    def test_four_distinct_knots(self):
        knots = [0, 0.25, 0.75, 1]
        expected = divdiff_distinct(plus_kernel(0.5, 2), knots)
        assert varsi_plus(0.5, knots) == pytest.approx(expected, rel=1e-12)

    def test_matches_distinct_formula(self, rng):
        for _ in range(300):
            n = int(rng.integers(1, 9))
            knots = rng.uniform(-1, 1, n + 1)
            y = rng.uniform(-1, 1)
            expected = exact_quotient(y, knots, n - 1, "plus")
            assert varsi_plus(y, knots) == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_too_few_knots(self):
        with pytest.raises(ValueError):
            varsi_plus(0.0, [1.0])


class TestVarsiMinus:
    def test_all_below(self):
        assert varsi_minus(2.0, [0, 0.5, 1]) == 1.0

    def test_all_above(self):
        assert varsi_minus(-1.0, [0, 0.5, 1]) == 0.0

    def test_complement_at_midpoint(self):
        # [.](x - 0.5)^2 = 1 splits evenly by symmetry of the knots
        assert varsi_minus(0.5, [0, 0.5, 1]) == pytest.approx(0.5)
        assert varsi_plus_high(0.5, [0, 0.5, 1]) == pytest.approx(0.5)

    def test_matches_distinct_formula(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 8))
            knots = rng.uniform(-1, 1, n + 1)
            y = rng.uniform(-1, 1)
            expected = exact_quotient(y, knots, n, "minus")
            assert varsi_minus(y, knots) == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_plus_high_matches_distinct_formula(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 8))
            knots = rng.uniform(-1, 1, n + 1)
            y = rng.uniform(-1, 1)
            expected = exact_quotient(y, knots, n, "plus")
            assert varsi_plus_high(y, knots) == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_complementarity(self, rng):
        for _ in range(300):
            n = int(rng.integers(1, 10))
            knots = rng.choice(rng.uniform(-1, 1, 4), size=n + 1)  # repeats likely
            y = rng.uniform(-1.2, 1.2)
            if np.any(knots == y):
                continue
            total = varsi_plus_high(y, knots) + varsi_minus(y, knots)
            assert total == pytest.approx(1.0, abs=1e-10)


def test_symmetry_under_knot_permutation(rng):
    for _ in range(50):
        n = int(rng.integers(2, 7))
        knots = rng.choice(rng.uniform(0, 1, 5), size=n + 1)
        y = rng.uniform(0, 1)
        ref = (varsi_plus(y, knots), varsi_minus(y, knots))
        for _ in range(5):
            perm = rng.permutation(knots)
            assert varsi_plus(y, perm) == pytest.approx(ref[0], abs=1e-12)
            assert varsi_minus(y, perm) == pytest.approx(ref[1], abs=1e-12)


def test_plus_tableau_is_nonnegative(rng):
    for _ in range(200):
        n = int(rng.integers(1, 10))
        knots = rng.choice(rng.uniform(-1, 1, 6), size=n + 1)
        y = rng.uniform(-1, 1)
        for variant in ("plus", "plus_high"):
            tab = varsi_tableau(y, knots, variant)
            assert np.all(tab.alpha >= 0)
            assert tab.r + tab.s == n + 1
            assert np.all(tab.b < y) and np.all(tab.c >= y)


def test_tableau_entries_are_partial_divided_differences(rng):
    knots = np.sort(rng.uniform(0, 1, 6))
    y = 0.5 * (knots[2] + knots[3])
    tab = varsi_tableau(y, knots, "plus")
    for k in range(1, tab.r + 1):
        for l in range(1, tab.s + 1):
            sub = np.concatenate([tab.b[:k], tab.c[:l]])
            expected = divdiff_distinct(plus_kernel(y, k + l - 2), sub)
            assert tab.alpha[k, l] == pytest.approx(expected, rel=1e-10, abs=1e-12)


class TestBSpline:
    def test_tent(self):
        assert bspline(0.5, [0, 0.5, 1]) == 2.0

    def test_outside(self):
        assert bspline(-1.0, [0, 0.2, 0.7, 1]) == 0.0

    def test_indicator(self):
        assert bspline(0.25, [0, 1]) == 1.0

    @pytest.mark.parametrize("knots", [[0, 0.3, 0.4, 1], [0, 0.5, 0.5, 0.9, 1], [0.1, 0.2, 0.2, 0.2, 0.8]])
    def test_unit_integral(self, knots):
        a, b = min(knots), max(knots)
        t = np.linspace(a, b, 10_001)
        m = [bspline(s, knots) for s in t]
        assert integrate.simpson(m, x=t) == pytest.approx(1.0, abs=1e-6)

    def test_peano_representation(self, rng):
        # g = x^(n+1): (1/n!) int g^(n)(t) M(t) dt = (n+1) int t M(t) dt
        for n in (1, 2, 3, 4):
            knots = np.sort(rng.uniform(0, 1, n + 1))
            val, _ = integrate.quad(lambda t: (n + 1) * t * bspline(t, knots),
                                    knots[0], knots[-1], points=knots[1:-1], limit=200)
            assert val == pytest.approx(divdiff_power_sym(n + 1, knots), abs=1e-6)


def test_hermite_genocchi_small_n(rng):
    # [a0, a1, a2] g = int over {1 >= x1 >= x2 >= 0} g''(a0 + (a1-a0) x1 + (a2-a1) x2)
    a = rng.uniform(-1, 1, 3)
    val, _ = integrate.dblquad(
        lambda x2, x1: np.exp(a[0] + (a[1] - a[0]) * x1 + (a[2] - a[1]) * x2),
        0, 1, lambda x1: 0.0, lambda x1: x1,
    )
    assert val == pytest.approx(divdiff_distinct(np.exp, a), rel=1e-8)


def test_batch_routes_match_scalar(rng):
    rows = np.sort(rng.choice(rng.uniform(0, 1, 5), size=(30, 4)), axis=1)
    ys = rng.uniform(-0.1, 1.1, 7)
    outer = truncated_divdiff_outer(ys, rows, ("plus", "minus", "plus_high"))
    scalar = {"plus": varsi_plus, "minus": varsi_minus, "plus_high": varsi_plus_high}
    for vi, name in enumerate(("plus", "minus", "plus_high")):
        for m, y in enumerate(ys):
            batch = truncated_divdiff_batch(np.full(rows.shape[0], y), rows, name)
            for u in range(rows.shape[0]):
                expected = scalar[name](y, rows[u])
                assert outer[vi, m, u] == expected
                assert batch[u] == expected


def test_unknown_variant():
    with pytest.raises(ValueError):
        truncated_divdiff_batch([0.0], [[0.0, 1.0]], "sideways")


def test_bspline_matches_factorial_scaling(rng):
    knots = np.sort(rng.uniform(0, 1, 5))
    t = 0.5
    n = 4
    expected = n * divdiff_distinct(plus_kernel(t, n - 1), knots)
    assert bspline(t, knots) == pytest.approx(expected, rel=1e-10)
