#!/usr/bin/env python3
"""Clustering in the single-user setup, with a concrete end-to-end run.

One user per cache, level identities of the users unknown in advance.  The
scheme serves scarce-memory levels uncoded and merges the rest into one
super-level that gets all the memory.  The demo runs the scheme for every
user arrangement of a small instance and confirms the transcript never
exceeds the analytic rate, then shows the seeded random-placement variant.
"""

import itertools
from fractions import Fraction

from cachelab import (SystemConfig, cluster_place_deliver,
                      cluster_place_deliver_decentralized, partition_su,
                      rate_clustering)

config = SystemConfig.single_user(4, [(3, 3), (60, 1)])
print("levels (files, users):", [(lv.files, lv.users) for lv in config.levels])

for M in (Fraction(0), Fraction(1, 2), Fraction(2), Fraction(10)):
    part = partition_su(config, M)
    rate = rate_clustering(config, M).achievable
    print(f"M = {str(M):>4}: uncoded levels {sorted(part.Hprime)}, "
          f"merged levels {sorted(part.Iprime)}, rate {rate}")

M = Fraction(2)
bound = rate_clustering(config, M).achievable
print(f"\nall user arrangements at M = {M} (rate bound {bound}):")
base = []
for idx, lv in enumerate(config.levels):
    base.extend([idx] * lv.users)
worst = Fraction(0)
for assignment in sorted(set(itertools.permutations(base))):
    demands = [0 if lvl == 0 else 7 for lvl in assignment]
    run = cluster_place_deliver(config, M, list(assignment), demands)
    worst = max(worst, run.total_size)
    print(f"  arrangement {assignment}: "
          f"{len(run.uncoded)} uncoded files + {run.coded.total_size} coded "
          f"= {run.total_size}")
assert worst <= bound

print("\nseeded random placement (same instance, 48 segments per file):")
run = cluster_place_deliver_decentralized(config, M, base, [0, 1, 2, 7],
                                          seed=2026, segments=48)
print(f"  total size {float(run.total_size):.4g} file units, "
      f"decodable: {run.decodable}")
