"""
Distribution of a three-player Choquet integral
===============================================

A capacity on three players, the exact moments of its Choquet integral
under independent uniform inputs, and a text plot of the density.
"""

import numpy as np

from lovaszdist import Capacity, classify, distribution_grid, moment_table, quantile

v = Capacity.from_mapping(3, {
    (1,): 0.1, (2,): 0.6, (3,): 0.9,
    (1, 2): 0.9, (1, 3): 0.9, (2, 3): 0.9,
    (1, 2, 3): 1.0,
})
print(classify(v))

# exact moments from the chain recursion
table = moment_table(v, 4)
print(f"mean {table.mean:.6f}  std {table.std:.6f}")
for r in range(1, 5):
    print(f"  E[Y^{r}] = {table.raw[r]:.10f}   central {table.central[r]:.10f}")

print("median", round(quantile(v, 0.5), 6))

# density on a coarse grid, drawn sideways
g = distribution_grid(v, 0.0, 1.0, 41)
scale = 60 / g.pdf.max()
for y, F, f in zip(g.grid, g.cdf, g.pdf):
    print(f"{y:5.3f} {F:6.4f} " + "#" * int(round(f * scale)))
