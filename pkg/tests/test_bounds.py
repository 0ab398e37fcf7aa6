import itertools
import random
from fractions import Fraction

import pytest

from cachelab.bounds import (CaseNotApplicable, MultiUserBoundParams,
                             best_cut_sizes, gap_report,
                             lower_bound_multi_user, lower_bound_single_user,
                             matched_bound_params, optimize_lower_bound_mu)
from cachelab.experiments import (random_multi_user_config,
                                  random_single_user_config)
from cachelab.model import Setup, SystemConfig
from cachelab.multi_user import rate_memory_sharing
from cachelab.radicals import exact_sign
from cachelab.single_user import rate_clustering


def one_level():
    return SystemConfig.multi_user(4, [(8, 2)])


def test_lemma_bound_examples():
    cfg = one_level()
    assert lower_bound_multi_user(cfg, 2, MultiUserBoundParams(1, 1, (2,))) == 2
    assert lower_bound_multi_user(cfg, 2, MultiUserBoundParams(1, 1, (1,))) == 0
    # M = 0, t=1, b=1, s_i = K//2
    assert lower_bound_multi_user(cfg, 0, MultiUserBoundParams(1, 1, (2,))) == 4


def test_bound_params_validation():
    cfg = one_level()
    with pytest.raises(ValueError):
        lower_bound_multi_user(cfg, 2, MultiUserBoundParams(0, 1, (1,)))
    with pytest.raises(ValueError):
        lower_bound_multi_user(cfg, 2, MultiUserBoundParams(1, 0, (1,)))
    with pytest.raises(ValueError):
        lower_bound_multi_user(cfg, 2, MultiUserBoundParams(1, 1, (3,)))  # > K/2t
    with pytest.raises(ValueError):
        lower_bound_multi_user(cfg, 2, MultiUserBoundParams(3, 1, (1,)))  # K/2t < 1
    with pytest.raises(ValueError):
        lower_bound_multi_user(cfg, 2, MultiUserBoundParams(1, 1, (1, 1)))


def test_optimizer_examples():
    cfg = one_level()
    value, params = optimize_lower_bound_mu(cfg, 2)
    assert value == 2
    assert params == MultiUserBoundParams(1, 1, (2,))
    assert optimize_lower_bound_mu(cfg, 8)[0] == 0
    v0, _ = optimize_lower_bound_mu(cfg, 0)
    assert v0 >= min(2 * 2, 8)  # at least max_i min{(K//2)U_i, N_i}


def test_optimizer_never_negative_and_monotone():
    rng = random.Random(23)
    for _ in range(6):
        cfg = random_multi_user_config(rng, max_levels=3)
        total = cfg.total_files
        values = []
        for k in range(8):
            M = Fraction(total) * k / 7
            value, params = optimize_lower_bound_mu(cfg, M)
            assert value >= 0
            if params is not None:
                params.validate(cfg.caches, len(cfg.levels))
            values.append(value)
        for lo, hi in zip(values[1:], values[:-1]):
            assert hi >= lo


def test_separable_choice_matches_exhaustive():
    rng = random.Random(31)
    for _ in range(40):
        K = rng.choice((4, 6, 8))
        L = rng.randint(1, 2)
        levels = [(rng.randint(1, 12) * K, rng.randint(1, 3)) for _ in range(L)]
        cfg = SystemConfig.multi_user(K, levels)
        for t in range(1, K // 2 + 1):
            smax = K // (2 * t)
            for b in range(1, 9):
                chosen = best_cut_sizes(cfg, t, b)
                best = None
                for svec in itertools.product(range(1, smax + 1), repeat=len(cfg.levels)):
                    val = lower_bound_multi_user(cfg, 0, MultiUserBoundParams(t, b, svec))
                    if best is None or val > best:
                        best = val
                got = lower_bound_multi_user(cfg, 0, MultiUserBoundParams(t, b, chosen))
                assert got == best


def _matched_case_config():
    # One popular level fully stored, one unpopular level left in the
    # intermediate regime at M = 120, with K = 96.
    return SystemConfig.multi_user(96, [(96, 1), (96 * 6400 * 50, 1)])


def test_optimizer_dominates_small_brute_force():
    rng = random.Random(47)
    for _ in range(8):
        K = rng.choice((4, 6, 8))
        levels = [(rng.randint(1, 10) * K, rng.randint(1, 2))
                  for _ in range(rng.randint(1, 2))]
        cfg = SystemConfig.multi_user(K, levels)
        total = cfg.total_files
        for M in (Fraction(0), Fraction(total, 4), Fraction(total, 2)):
            brute = Fraction(0)
            for t in range(1, K // 2 + 1):
                smax = K // (2 * t)
                for b in range(1, 9):
                    for svec in itertools.product(range(1, smax + 1),
                                                  repeat=len(cfg.levels)):
                        value = lower_bound_multi_user(
                            cfg, M, MultiUserBoundParams(t, b, svec))
                        brute = max(brute, value)
            assert optimize_lower_bound_mu(cfg, M)[0] >= brute


def test_matched_params_examples():
    cfg = _matched_case_config()
    M = Fraction(120)
    params = matched_bound_params(cfg, M)
    assert params.t == 1
    assert params.b >= 1  # guaranteed while the full-storage set is nonempty
    params.validate(cfg.caches, len(cfg.levels))
    # the cut bound at the matched parameters is sound
    value = lower_bound_multi_user(cfg, M, params)
    achievable = rate_memory_sharing(cfg, M).achievable
    assert exact_sign(achievable - value) >= 0

    with pytest.raises(CaseNotApplicable):
        matched_bound_params(one_level(), 2)  # K < 96
    with pytest.raises(CaseNotApplicable):
        matched_bound_params(cfg, 0)  # empty full-storage set


def test_matched_params_h_cut_size():
    # A no-memory level under the matched recipe gets floor(K/8) windows.
    K = 96
    cfg = SystemConfig.multi_user(
        K, [(K, 1), (K * 6400 * 50, 1), (K * 6400 * 50 * 6400, 1)])
    M = Fraction(120)
    params = matched_bound_params(cfg, M)
    from cachelab.multi_user import refine_partition
    refined = refine_partition(cfg, M)
    assert refined.H and refined.J and refined.Iprime
    for h in refined.H:
        assert params.s[h] == K // 8 == 12
    for j in refined.J:
        assert params.s[j] == 1
    params.validate(cfg.caches, len(cfg.levels))


def test_single_user_bound_examples():
    cfg = SystemConfig.single_user(5, [(4, 4), (100, 1)])
    value, params = lower_bound_single_user(cfg, Fraction(1, 10))
    assert value == Fraction(9, 2)
    assert params.b == 1 and set(params.s) == {4, 1}

    value10, params10 = lower_bound_single_user(cfg, 10)
    assert value10 == Fraction(5, 6)
    assert params10.s_J == 0  # M >= N_J = 4

    assert lower_bound_single_user(cfg, 104)[0] == 0


def test_single_user_bound_collective_cut():
    # Everything in the full-storage regime but memory below its library.
    cfg = SystemConfig.single_user(4, [(4, 2), (8, 2)])
    M = Fraction(3)
    value, params = lower_bound_single_user(cfg, M)
    assert params.s_J >= 1
    assert params.n_J == 12  # all files decodable: b >= every N_j
    assert value == Fraction(12 - params.s_J * 3, params.b)


def test_single_user_bound_budget():
    rng = random.Random(13)
    for _ in range(25):
        cfg = random_single_user_config(rng)
        total = cfg.total_files
        for k in range(6):
            M = Fraction(total) * k / 5
            _, params = lower_bound_single_user(cfg, M)
            assert sum(params.s) + params.s_J <= cfg.caches
            for s_i, lv in zip(params.s, cfg.levels):
                assert 0 <= s_i <= lv.users


def test_bounds_sound_on_random_instances():
    rng = random.Random(37)
    for _ in range(6):
        cfg = random_multi_user_config(rng, max_levels=3)
        total = cfg.total_files
        for k in range(6):
            M = Fraction(total) * k / 5
            lower, _ = optimize_lower_bound_mu(cfg, M)
            achievable = rate_memory_sharing(cfg, M).achievable
            assert exact_sign(achievable - lower) >= 0
    for _ in range(10):
        cfg = random_single_user_config(rng)
        total = cfg.total_files
        for k in range(6):
            M = Fraction(total) * k / 5
            lower, _ = lower_bound_single_user(cfg, M)
            assert rate_clustering(cfg, M).achievable >= lower


def test_single_user_bound_monotone():
    rng = random.Random(41)
    for _ in range(10):
        cfg = random_single_user_config(rng)
        total = cfg.total_files
        values = []
        for k in range(10):
            M = Fraction(total) * k / 9
            values.append(lower_bound_single_user(cfg, M)[0])
        for lo, hi in zip(values[1:], values[:-1]):
            assert hi >= lo


def test_gap_report_examples():
    cfg = one_level()
    g = gap_report(Setup.MULTI_USER, Fraction(6), Fraction(2), 2, cfg)
    assert g.ratio == 3 and g.within and g.constant == 192 and not g.inversion

    cfg_su = SystemConfig.single_user(5, [(4, 4), (100, 1)])
    g2 = gap_report(Setup.SINGLE_USER, Fraction(5), Fraction(9, 2), Fraction(1, 10), cfg_su)
    assert g2.ratio == Fraction(10, 9) and g2.within and g2.constant == Fraction(6, 5)

    g3 = gap_report(Setup.SINGLE_USER, Fraction(0), Fraction(0), 7, cfg_su)
    assert g3.ratio == 0 and g3.within

    g4 = gap_report(Setup.MULTI_USER, Fraction(1), Fraction(2), 2, cfg)
    assert g4.inversion

    g5 = gap_report(Setup.MULTI_USER, Fraction(1), Fraction(0), 2, cfg)
    assert g5.ratio is None and not g5.within and not g5.inversion

    # boundary memory M = 1/6 uses the general single-user constant
    g6 = gap_report(Setup.SINGLE_USER, Fraction(1), Fraction(1), Fraction(1, 6), cfg_su)
    assert g6.constant == 72
