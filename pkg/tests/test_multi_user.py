import random
from fractions import Fraction

from cachelab.experiments import random_multi_user_config
from cachelab.model import SystemConfig
from cachelab.multi_user import (allocate_memory,
                                 enumerate_feasible_partitions,
                                 find_m_feasible_partition, level_rate_bounds,
                                 rate_memory_sharing, refine_partition)
from cachelab.radicals import exact_sign
from cachelab.single_level import rate_single_level


def one_level():
    return SystemConfig.multi_user(4, [(8, 2)])


def test_partition_single_level_examples():
    p = find_m_feasible_partition(one_level(), 2)
    assert (set(p.H), set(p.I), set(p.J)) == (set(), {0}, set())
    assert p.M_tilde == 1

    p0 = find_m_feasible_partition(one_level(), 0)
    assert set(p0.I) == {0}
    assert p0.M_tilde == Fraction(1, 2)  # boundary equality goes to I

    p_full = find_m_feasible_partition(one_level(), 9)
    assert (set(p_full.H), set(p_full.I), set(p_full.J)) == (set(), set(), {0})
    assert p_full.M_tilde is None


def test_partition_matches_exhaustive_oracle():
    rng = random.Random(42)
    for _ in range(12):
        cfg = random_multi_user_config(rng, max_levels=3)
        total = cfg.total_files
        for M in (Fraction(0), Fraction(total, 7), Fraction(total, 2), Fraction(total)):
            oracle = enumerate_feasible_partitions(cfg, M)
            chosen = find_m_feasible_partition(cfg, M)
            assert chosen.key() in oracle


def test_partition_covers_irregular_instances_too():
    # The feasibility windows of consecutive splits abut exactly at the
    # stored-prefix sizes, so the scan succeeds even off the regularity
    # conditions (popularity ratio here is only 2^12) and at close or
    # equal popularity levels.
    for cfg in (SystemConfig.multi_user(4, [(2 ** 10, 2 ** 8), (2 ** 16, 2 ** 4)]),
                SystemConfig.multi_user(2, [(4, 1), (8, 2)])):
        total = cfg.total_files
        for k in range(25):
            M = Fraction(total) * k / 24
            partition = find_m_feasible_partition(cfg, M)
            assert partition.key() in enumerate_feasible_partitions(cfg, M)


def test_allocation_examples():
    cfg = one_level()
    p = find_m_feasible_partition(cfg, 2)
    a = allocate_memory(p, cfg, 2)
    assert a.amounts == (Fraction(2),)
    assert a.alphas == (Fraction(1),)

    p8 = find_m_feasible_partition(cfg, 8)
    a8 = allocate_memory(p8, cfg, 8)
    assert a8.amounts == (Fraction(8),)  # full storage endpoint

    p9 = find_m_feasible_partition(cfg, 9)
    a9 = allocate_memory(p9, cfg, 9)
    assert a9.amounts == (Fraction(8),)  # J level stores its library


def test_allocation_invariants_randomized():
    rng = random.Random(7)
    for _ in range(10):
        cfg = random_multi_user_config(rng, max_levels=4)
        total = cfg.total_files
        for M in (Fraction(0), Fraction(total, 9), Fraction(total, 3),
                  Fraction(2 * total, 3), Fraction(total)):
            p = find_m_feasible_partition(cfg, M)
            a = allocate_memory(p, cfg, M)
            acc = Fraction(0)
            for lv, amount in zip(cfg.levels, a.amounts):
                assert exact_sign(amount) >= 0
                assert exact_sign(amount - lv.files) <= 0
                acc = acc + amount
            assert exact_sign(acc - M) == 0  # sum of alphas is exactly 1


def test_refine_examples():
    cfg = one_level()
    r = refine_partition(cfg, 2)
    assert set(r.I1) == {0} and not r.I0 and not r.Iprime

    r2 = refine_partition(cfg, Fraction(3, 4))
    assert set(r2.I0) == {0}

    r3 = refine_partition(cfg, 9)
    assert set(r3.J) == {0} and not (r3.I0 | r3.Iprime | r3.I1)


def test_rate_examples():
    cfg = one_level()
    assert rate_memory_sharing(cfg, 2).achievable == 6
    assert rate_memory_sharing(cfg, 0).achievable == 8
    assert rate_memory_sharing(cfg, 8).achievable == 0


def test_single_level_instances_reduce_to_plain_rate():
    # with one level the whole cache goes to it, so memory sharing must
    # collapse to the single-level formula at every memory
    for K, N, U in [(4, 8, 2), (3, 12, 1), (8, 64, 4)]:
        cfg = SystemConfig.multi_user(K, [(N, U)])
        for k in range(13):
            M = Fraction(N) * k / 12
            assert rate_memory_sharing(cfg, M).achievable == \
                rate_single_level(M, K, N, U)


def test_rate_report_carries_witnesses():
    rep = rate_memory_sharing(one_level(), 2)
    assert rep.partition is not None and rep.allocation is not None
    assert rep.regular
    assert rep.extras["approx_rate"] == 6


def test_rate_nonincreasing_in_memory():
    rng = random.Random(3)
    for _ in range(5):
        cfg = random_multi_user_config(rng, max_levels=3)
        total = cfg.total_files
        values = []
        for k in range(9):
            M = Fraction(total) * k / 8
            values.append(rate_memory_sharing(cfg, M).achievable)
        for lo, hi in zip(values[1:], values[:-1]):
            assert exact_sign(hi - lo) >= 0


def test_level_bound_examples():
    cfg = one_level()
    assert level_rate_bounds(cfg, 2) == [120]
    # H levels are capped at K*U exactly, J levels at zero
    cfg2 = SystemConfig.multi_user(4, [(8, 2), (102400 * 4, 4)])
    bounds = level_rate_bounds(cfg2, Fraction(1, 2))
    refined = refine_partition(cfg2, Fraction(1, 2))
    for h in refined.H:
        assert bounds[h] == 4 * cfg2.levels[h].users
    bounds_full = level_rate_bounds(cfg2, cfg2.total_files + 1)
    assert bounds_full == [0, 0]


def test_per_level_rate_below_bound():
    rng = random.Random(11)
    for _ in range(8):
        cfg = random_multi_user_config(rng, max_levels=3)
        total = cfg.total_files
        for M in (Fraction(0), Fraction(total, 11), Fraction(total, 2),
                  Fraction(9 * total, 10)):
            p = find_m_feasible_partition(cfg, M)
            amounts = allocate_memory(p, cfg, M).amounts
            caps = level_rate_bounds(cfg, M)
            for lv, amount, cap in zip(cfg.levels, amounts, caps):
                achieved = rate_single_level(amount, cfg.caches, lv.files, lv.users)
                assert exact_sign(cap - achieved) >= 0


def test_refined_high_memory_set_is_small_for_regular_instances():
    rng = random.Random(19)
    for _ in range(10):
        cfg = random_multi_user_config(rng, max_levels=4)
        total = cfg.total_files
        for M in (Fraction(total, 5), Fraction(total, 2)):
            refined = refine_partition(cfg, M)
            assert len(refined.I1) <= 1
