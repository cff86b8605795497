"""
Box-counting dimension of the Koch snowflake
============================================

Counts occupied dyadic cells of the order-6 snowflake, fits the log-log
slope and compares it with the similarity dimension log 4 / log 3.
"""

import numpy as np

from fractaldim.estimators import auto_range, box_dimension, scale_profile
from fractaldim.generators import koch_curve_ifs, koch_snowflake, moran_dimension

K = koch_snowflake(6)
print(f"{len(K)} vertices")

# the count profile: roughly 4x more cells for every 3x finer grid
prof = scale_profile(K, range(0, 15))
for r, n, y in zip(prof.scales, prof.counts, prof.log2_counts):
    print(f"r={r:2d}  N_r={n:6d}  log2 N_r={y:7.3f}")

# fixed range versus the automatically chosen one
fixed = box_dimension(K, 3, 8)
lo, hi = auto_range(K)
auto = box_dimension(K)
print(f"r in [3, 8]: {fixed.value:.4f}  (band {fixed.lower_slope:.4f} .. {fixed.upper_slope:.4f})")
print(f"r in [{lo}, {hi}] (auto): {auto.value:.4f}")
print(f"similarity dimension: {moran_dimension(koch_curve_ifs()):.4f}")

# once every vertex sits in its own cell the profile goes flat
print("saturation at r =", int(np.argmax(np.array(prof.counts) == len(K))))
