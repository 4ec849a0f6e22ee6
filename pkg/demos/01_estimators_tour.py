"""Tour of the location and scale estimators on clean and contaminated data.

The classical mean/standard deviation pair chases outliers wherever they go;
the median, Hodges-Lehmann, MAD, and pairwise-difference estimators stay put.
"""

import numpy as np

from robustfinite import hl1, hl2, hl3, mad, mean, median, shamos, std_dev

rng = np.random.default_rng(7)
clean = rng.normal(loc=10.0, scale=2.0, size=25)

# corrupt three observations the way a stuck sensor would
corrupted = clean.copy()
corrupted[:3] = 250.0

print(f"{'estimator':>22} {'clean':>10} {'corrupted':>10}")
for name, fn in [
    ("mean", mean),
    ("median", median),
    ("hl1 (pairs i<j)", hl1),
    ("hl2 (Walsh averages)", hl2),
    ("hl3 (all pairs)", hl3),
]:
    print(f"{name:>22} {fn(clean):>10.3f} {fn(corrupted):>10.3f}")

print()
for name, fn in [
    ("std dev", std_dev),
    ("MAD (consistent)", mad),
    ("pairwise diff scale", shamos),
]:
    print(f"{name:>22} {fn(clean):>10.3f} {fn(corrupted):>10.3f}")

print("""
The true parameters are mu = 10, sigma = 2.  Three wild values out of 25
drag the mean and standard deviation far away, while every robust estimate
moves only slightly.
""")
