import math
from fractions import Fraction

import pytest

from smcensus.distributions import (EXTENDED, PLAIN, DistributionError,
                                    asymptotic_dominance_probe,
                                    cyclic_gap_expectation, cyclic_gap_pmf,
                                    cyclic_gap_pmf_bruteforce, dominance_check,
                                    dominance_check_grid, gap_dependence_check,
                                    jensen_pair_check,
                                    legal_identification_patterns,
                                    line_gap_log_mean, line_gap_pmf,
                                    line_gap_tail, line_gap_total,
                                    sample_cyclic_gap, sample_line_gap)
from smcensus.posets import grid_diamond, random_tangled_grid


def test_small_cyclic_pmf():
    pmf = dict(cyclic_gap_pmf(3, 2).support)
    assert pmf == {1: Fraction(1, 6), 2: Fraction(2, 6), 3: Fraction(3, 6)}


def test_cyclic_pmf_matches_enumeration():
    for n in range(2, 10):
        for l in range(2, n + 1):
            closed = dict(cyclic_gap_pmf(n, l).support)
            brute = dict(cyclic_gap_pmf_bruteforce(n, l).support)
            assert closed == brute, (n, l)


def test_cyclic_pmf_parameter_validation():
    with pytest.raises(DistributionError):
        cyclic_gap_pmf(3, 1)
    with pytest.raises(DistributionError):
        cyclic_gap_pmf(3, 4)


def test_cyclic_moments():
    m = cyclic_gap_expectation(3, 2)
    assert m.expectation == Fraction(7, 3)
    assert m.given_marked_unchosen == Fraction(8, 3)
    assert m.given_marked_chosen == Fraction(2)
    for n in range(2, 21):
        for l in range(2, n + 1):
            mm = cyclic_gap_expectation(n, l)
            assert mm.given_marked_unchosen == Fraction(2 * (n + 1), l + 1)
            assert mm.given_marked_chosen == Fraction(n + 1, l)
            assert mm.expectation <= Fraction(2 * (n + 1), l + 1)


def test_plain_pmf_values():
    assert line_gap_pmf(Fraction(1, 2), 1, PLAIN) == Fraction(1, 4)
    assert line_gap_pmf(Fraction(1, 2), 2, EXTENDED) == Fraction(9, 64)


def test_normalization_exact_at_rational_points():
    for i in range(1, 21):
        x = Fraction(i, 21)
        assert line_gap_total(x, 35, PLAIN) == 1
        assert line_gap_total(x, 35, EXTENDED) == 1


def test_tail_recurrence():
    x = Fraction(3, 7)
    for variant, k0 in ((PLAIN, 2), (EXTENDED, 4)):
        for k in range(k0, 25):
            assert line_gap_tail(x, k - 1, variant) - line_gap_tail(x, k, variant) \
                == line_gap_pmf(x, k, variant)


def test_x_range_validation():
    for bad in (0, 1, -0.5, 1.5):
        with pytest.raises(DistributionError):
            line_gap_pmf(bad, 2, PLAIN)


def test_samplers_deterministic():
    assert sample_cyclic_gap(5, 3, 7, 500) == sample_cyclic_gap(5, 3, 7, 500)
    for variant in (PLAIN, EXTENDED):
        assert sample_line_gap(0.3, variant, 7, 500) == \
            sample_line_gap(0.3, variant, 7, 500)


def test_sampler_frequencies_match_pmf():
    draws = 40000
    s = sample_cyclic_gap(3, 2, 42, draws)
    for k, p in [(1, 1 / 6), (2, 2 / 6), (3, 3 / 6)]:
        assert abs(s.count(k) / draws - p) <= 4 * math.sqrt(p * (1 - p) / draws)
    for variant in (PLAIN, EXTENDED):
        s = sample_line_gap(0.5, variant, 42, draws)
        for k in range(1, 6):
            p = float(line_gap_pmf(0.5, k, variant))
            assert abs(s.count(k) / draws - p) <= 4 * math.sqrt(p * (1 - p) / draws)


def test_trivial_grid_dominance():
    grid = random_tangled_grid(1, 0)
    assert grid.n == 1
    assert dominance_check_grid(grid) == []  # no valid l exists


def test_dominance_on_diamond_and_random_grids():
    for rep in dominance_check_grid(grid_diamond(3)):
        assert rep.passed, (rep.chain_index, rep.l, rep.witnesses[:2])
    for seed in range(6):
        grid = random_tangled_grid(2 + seed % 3, seed)
        for rep in dominance_check_grid(grid):
            assert rep.passed


def test_dominance_parameter_validation():
    grid = grid_diamond(3)
    with pytest.raises(DistributionError):
        dominance_check(grid, 0, 1)
    with pytest.raises(DistributionError):
        dominance_check(grid, 6, 2)


def test_jensen_examples():
    lhs, rhs, ok = jensen_pair_check(1, 1, 1, Fraction(1, 2))
    assert ok
    assert abs(lhs - (math.log(2) / 2 + math.log(3) / 4)) < 1e-12
    assert abs(rhs - math.log(3) / 2) < 1e-12
    for x in (0, 1):
        lhs, rhs, ok = jensen_pair_check(2, 5, 7, x)
        assert ok and abs(lhs - rhs) < 1e-12
    with pytest.raises(DistributionError):
        jensen_pair_check(0, 1, 1, 0.5)


def test_identification_patterns():
    pats = legal_identification_patterns()
    assert () in pats and ((-1, 1), (0, 2)) in pats
    with pytest.raises(DistributionError, match="adjacent"):
        gap_dependence_check(0.5, ((0, 1),), seed=0, samples=100)
    with pytest.raises(DistributionError, match="adjacent"):
        gap_dependence_check(0.5, ((-1, 1), (1, 2)), seed=0, samples=100)


def test_dependence_check_small():
    res = gap_dependence_check(0.3, ((0, 2),), seed=1, samples=60000)
    assert res.passed
    # independent estimate agrees with the exact series value
    assert abs(res.independent_mean - line_gap_log_mean(0.3, EXTENDED)) < 0.02
    empty = gap_dependence_check(0.3, (), seed=1, samples=20000)
    assert empty.passed and empty.diff_mean == 0.0


def test_asymptotic_probe():
    res = asymptotic_dominance_probe(50, seed=3, samples=1500)
    assert res.passed, res.worst_shortfall
    assert res.cells
