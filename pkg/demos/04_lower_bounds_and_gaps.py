#!/usr/bin/env python3
"""Lower bounds and optimality gaps for both setups.

Evaluates the window-sum bound for the multi-user setup (maximized over
its parameter grid) and the cut-set recipe for the single-user setup, then
runs a small randomized audit against the published gap constants.
"""

from fractions import Fraction

from cachelab import (Setup, SystemConfig, audit, gap_report,
                      lower_bound_single_user, optimize_lower_bound_mu,
                      rate_clustering, rate_memory_sharing)

config = SystemConfig.multi_user(8, [(16, 2), (204800, 2)])
total = config.total_files
print("multi-user instance:", [(lv.files, lv.users) for lv in config.levels])
print(f"{'M':>10} {'achievable':>12} {'lower':>10} {'gap':>8}   bound params (t, b, s)")
for k in (0, 1, 2, 6, 10, 14):
    M = Fraction(total) * k / 16
    achievable = rate_memory_sharing(config, M).achievable
    lower, params = optimize_lower_bound_mu(config, M)
    gap = gap_report(Setup.MULTI_USER, achievable, lower, M, config)
    ratio = f"{float(gap.ratio):.3f}" if gap.ratio is not None else "-"
    shape = (params.t, params.b, params.s) if params else None
    print(f"{float(M):>10.4g} {float(achievable):>12.5g} {float(lower):>10.5g} "
          f"{ratio:>8}   {shape}")

config_su = SystemConfig.single_user(5, [(4, 4), (100, 1)])
print("\nsingle-user instance:", [(lv.files, lv.users) for lv in config_su.levels])
for M in (Fraction(1, 10), Fraction(1), Fraction(10), Fraction(50)):
    achievable = rate_clustering(config_su, M).achievable
    lower, params = lower_bound_single_user(config_su, M)
    gap = gap_report(Setup.SINGLE_USER, achievable, lower, M, config_su)
    print(f"M = {str(M):>5}: rate {float(achievable):>7.4g}, bound {float(lower):>7.4g}, "
          f"gap {float(gap.ratio):.4g} (constant {gap.constant}), b = {params.b}")

print("\nrandomized audit, 30 instances per setup:")
for setup in (Setup.MULTI_USER, Setup.SINGLE_USER):
    summary = audit(setup, 30, seed=7)
    worst = {k: round(v[0], 3) for k, v in summary.max_ratio.items()}
    print(f"  {setup.value}: ok={summary.ok}, worst gap per constant {worst}")
