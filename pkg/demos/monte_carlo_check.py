"""
Checking the exact CDF against simulation
=========================================

Seeded samples of ``h(X)`` compared with the exact CDF through the
Kolmogorov-Smirnov distance, for each bundled capacity file.
"""

import numpy as np

from lovaszdist import Capacity, corpus, read_capacity
from lovaszdist.oracle import ks_statistic, ks_threshold, sample

N = 100_000
print(f"threshold {ks_threshold(N):.5f}")
for name, path in corpus().items():
    v = read_capacity(path)
    d = ks_statistic(sample(v, N, seed=1), v)
    print(f"{name:15s} n={v.n}  ks={d:.5f}  {'pass' if d < ks_threshold(N) else 'FAIL'}")

# a wrong capacity is caught
v = read_capacity(corpus()["worked_example"])
shifted = Capacity(v.n, v.values + np.where(np.arange(8) == 7, 0.3, 0.0))
print("shifted capacity ks", round(ks_statistic(sample(shifted, 10_000, seed=1), v), 4))
