#!/usr/bin/env python3
"""The strategy dichotomy: each setup punishes the other setup's scheme.

Multi-user family: clustering two levels whose popularities diverge costs
a factor that grows like 8^r.  Single-user family: splitting the memory
across L equal levels costs a factor L versus merging them.
"""

from cachelab import dichotomy_multi_user, dichotomy_single_user

print("multi-user family: clustering vs memory sharing")
print(f"{'r':>3} {'closed-form ratio':>18} {'engine ratio':>14} {'8^r':>12}")
for r in range(1, 7):
    d = dichotomy_multi_user(r)
    print(f"{r:>3} {float(d.ratio):>18.6g} {float(d.exact_ratio):>14.6g} "
          f"{8 ** r:>12}")

print("\nsuccessive closed-form quotients approach 8:")
prev = None
for r in range(3, 9):
    ratio = float(dichotomy_multi_user(r).ratio)
    if prev:
        print(f"  ratio({r})/ratio({r - 1}) = {ratio / prev:.5f}")
    prev = ratio

print("\nsingle-user family: per-level splitting vs clustering")
print(f"{'L':>3} {'closed-form ratio':>18} {'engine split rate':>18} {'engine merged':>14}")
for L in (2, 3, 4, 6, 8, 10):
    d = dichotomy_single_user(L)
    print(f"{L:>3} {str(d.ratio):>18} {float(d.exact_memory_sharing):>18.6g} "
          f"{float(d.exact_clustering):>14.6g}")
