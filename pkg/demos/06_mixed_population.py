#!/usr/bin/env python3
"""Mixed user population: superposing the two strategies.

Some levels are requested at every cache, others by a single row of users.
The memory splits into a gamma fraction for the replicated class (memory
sharing) and the rest for the single-row class (clustering).  No lower
bound is computed for this setup.
"""

from fractions import Fraction

from cachelab import LevelSpec, Setup, SystemConfig, mixed_rate

config = SystemConfig(
    Setup.MIXED, 4,
    levels=(LevelSpec(8, 2),),                      # at every cache
    mixed_levels=(LevelSpec(12, 3), LevelSpec(50, 1)))  # one row of users
M = Fraction(6)

print("replicated class:", [(lv.files, lv.users) for lv in config.levels])
print("single-row class:", [(lv.files, lv.users) for lv in config.mixed_levels])
print(f"memory: {M}\n")

print(f"{'gamma':>8} {'rate':>10}")
for k in range(0, 11):
    gamma = Fraction(k, 10)
    report = mixed_rate(config, M, gamma=gamma)
    print(f"{str(gamma):>8} {float(report.achievable):>10.5g}")

best = mixed_rate(config, M)
print(f"\ngrid optimum: gamma = {best.extras['best_gamma']} "
      f"with rate {float(best.extras['best_rate']):.5g}")
