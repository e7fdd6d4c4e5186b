"""
Min, box and guided filters
===========================
"""
# %%
import time

import numpy as np

from hazecascade import box_filter, guided_filter, min_filter_fast, min_filter_naive

rng = np.random.default_rng(0)
plane = rng.random((64, 64))

# the fast min filter is exact, not an approximation
print(np.array_equal(min_filter_fast(plane, 7), min_filter_naive(plane, 7)))

# %%
# Its cost does not grow with the radius (two passes of prefix/suffix minima).
big = rng.random((1024, 1024))
for r in (1, 7, 15, 31):
    start = time.perf_counter()
    min_filter_fast(big, r)
    print(f"r={r:2d}  {1e3 * (time.perf_counter() - start):6.1f} ms")

# %%
# Box filter: a window mean from a summed-area table. Borders replicate edges,
# so a constant plane stays constant everywhere.
print(np.ptp(box_filter(np.full((20, 20), 0.3), 5)))

# %%
# The guided filter smooths src but keeps the edges of the guide.
step = np.zeros((32, 32))
step[:, 16:] = 1.0
noisy = step + 0.2 * rng.standard_normal(step.shape)
smooth = guided_filter(step, noisy, r=4, eps=1e-2)
print("noise std before/after:", noisy[:, :12].std().round(3), smooth[:, :12].std().round(3))
print("edge jump kept:", (smooth[:, 17] - smooth[:, 14]).mean().round(3))
