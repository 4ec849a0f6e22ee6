"""Finite-sample breakdown points versus their asymptotic limits.

Small samples tolerate noticeably less contamination than the asymptotic
breakdown points (1/2 for the median, 1 - 1/sqrt(2) for the Hodges-Lehmann
family) suggest.  The closed forms are exact; a brute-force counting oracle
confirms them.
"""

import math

from robustfinite import breakdown_oracle, breakdown_point, breakdown_table

print(f"{'n':>4} {'median/MAD':>12} {'hl1/pairwise':>13} {'hl2':>10} {'hl3':>10}")
for row in breakdown_table(20):
    print(f"{row['n']:>4} {row['median_mad']:>12.7f} {row['hl1_shamos']:>13.7f} "
          f"{row['hl2']:>10.7f} {row['hl3']:>10.7f}")

print(f"{'inf':>4} {0.5:>12.7f} {1 - 1/math.sqrt(2):>13.7f} "
      f"{1 - 1/math.sqrt(2):>10.7f} {1 - 1/math.sqrt(2):>10.7f}")

print("\nNote n = 10: the median suddenly tolerates only 40%, and hl2 (30%)"
      "\nbeats hl3 and hl1 (20%) -- the variants genuinely differ in finite"
      "\nsamples even though all three share one asymptotic limit.")

# the exact k* counts behind the fractions, cross-checked by exhaustive search
print(f"\n{'n':>4} {'estimator':>10} {'k* closed':>10} {'k* oracle':>10}")
for n in (5, 10, 47):
    for estimator in ("median", "hl1", "hl2", "hl3"):
        closed = breakdown_point(n, estimator)
        oracle = breakdown_oracle(n, estimator)
        assert closed.k_star == oracle.k_star
        print(f"{n:>4} {estimator:>10} {closed.k_star:>10} {oracle.k_star:>10}")
