"""
Order statistics and OWA operators
==================================

A capacity that depends only on subset size gives a weighted sum of order
statistics.  Its distribution comes from a single knot profile, so ``n`` is
not limited by the ``n!`` permutation sum.
"""

import numpy as np
from scipy.special import betainc

from lovaszdist import Capacity, cdf, cdf_symmetric

# the k-th smallest of n uniforms is Beta(k, n - k + 1)
n = 7
ys = np.linspace(0, 1, 11)
for k in (1, 4, 7):
    v = Capacity.from_cardinality([1.0 if j >= n - k + 1 else 0.0 for j in range(n + 1)])
    err = np.max(np.abs(cdf_symmetric(v, ys) - betainc(k, n - k + 1, ys)))
    print(f"k={k}: max deviation from the incomplete Beta {err:.1e}")

# an OWA with 20 inputs, far beyond the permutation sum
n = 20
weights = np.linspace(2.0, 1.0, n)
weights /= weights.sum()
owa = Capacity.from_cardinality(np.concatenate([[0.0], np.cumsum(weights)]))
for y in (0.3, 0.45, 0.5, 0.55, 0.7):
    print(f"P(OWA <= {y:.2f}) = {cdf(owa, y):.8f}")
