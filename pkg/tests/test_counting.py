import math
from fractions import Fraction

import pytest

from smcensus.counting import (BipartiteGraph, BoundMode, FamilyError,
                               TupleFamily, bound_holds, bregman_log_bound,
                               count_perfect_matchings, diagonal_pair_family,
                               downset_top_family, option_count,
                               perfect_matching_family, random_bipartite_graph,
                               reveal_bound, reveal_bounds_exact)
from smcensus.posets import count_downsets, grid_diamond, random_tangled_grid
from smcensus.rng import Xoshiro256StarStar, bernoulli_threshold

ORDERS = {"123": (0, 1, 2), "132": (0, 2, 1), "213": (1, 0, 2),
          "231": (1, 2, 0), "312": (2, 0, 1), "321": (2, 1, 0)}


def test_family_of_three():
    fam = diagonal_pair_family(1)
    assert set(fam.members) == {(1, 1, 0), (1, 0, 1), (0, 1, 1)}


@pytest.mark.parametrize("member, expected", [
    ((2, 2, 0), {"123": 6, "132": 6, "213": 2, "231": 1, "312": 5, "321": 1}),
    ((2, 0, 2), {"123": 6, "132": 6, "213": 5, "231": 1, "312": 2, "321": 1}),
    ((0, 2, 2), {"123": 6, "132": 6, "213": 2, "231": 1, "312": 2, "321": 1}),
])
def test_option_count_table(member, expected):
    fam = diagonal_pair_family(5)
    for name, order in ORDERS.items():
        assert option_count(fam, member, order, 0) == expected[name]


def test_option_count_errors():
    fam = diagonal_pair_family(2)
    with pytest.raises(FamilyError, match="not a family member"):
        option_count(fam, (2, 2, 2), (0, 1, 2), 0)
    with pytest.raises(FamilyError, match="permutation"):
        option_count(fam, (1, 1, 0), (0, 0, 2), 0)


def test_option_count_monotone_in_reveal_position():
    # moving a component later can only shrink its option count
    fam = downset_top_family(random_tangled_grid(3, 2))
    rng = Xoshiro256StarStar(11)
    for _ in range(30):
        order = tuple(rng.permutation(fam.n))
        member = fam.members[rng.randrange(len(fam.members))]
        i = order[rng.randrange(fam.n - 1)]
        pos = order.index(i)
        later = order[:pos] + order[pos + 1:pos + 2] + (i,) + order[pos + 2:]
        assert option_count(fam, member, later, i) <= option_count(fam, member, order, i)


def test_revealed_last_with_pinned_prefix_gives_one():
    fam = diagonal_pair_family(4)
    for member in fam.members:
        assert option_count(fam, member, (1, 2, 0), 0) == 1


def test_option_count_never_exceeds_component_size():
    fam = downset_top_family(random_tangled_grid(3, 4))
    rng = Xoshiro256StarStar(13)
    for _ in range(40):
        order = tuple(rng.permutation(fam.n))
        member = fam.members[rng.randrange(len(fam.members))]
        i = rng.randrange(fam.n)
        assert 1 <= option_count(fam, member, order, i) <= len(fam.components[i])


def test_fixed_order_bound_closed_form():
    for n_max in (2, 5, 10):
        fam = diagonal_pair_family(n_max)
        res = reveal_bound(fam, BoundMode("fixed_order", orders=(0, 1, 2)))
        closed = math.log(n_max + 1) + math.log(n_max) / 3 + 2 * math.log(2) / 3
        assert abs(res.value - closed) < 1e-12
        assert res.value >= math.log(3 * n_max)


def test_mean_product_closed_form():
    fam = diagonal_pair_family(5)
    res = reveal_bound(fam, BoundMode("mean_product"))
    assert res.product == Fraction(21, 6) ** 3


def test_singleton_family_bound_is_zero():
    fam = TupleFamily(((0,), (0,)), ((0, 0),))
    for variant in ("averaged", "worst_member", "mean_product"):
        res = reveal_bound(fam, BoundMode(variant))
        assert abs(res.value) < 1e-12
        assert bound_holds(res, fam)


def test_bounds_cover_family_size_exact_and_mc():
    fams = [diagonal_pair_family(4),
            downset_top_family(grid_diamond(2)),
            downset_top_family(random_tangled_grid(3, 5))]
    for fam in fams:
        for variant, res in reveal_bounds_exact(fam).items():
            assert bound_holds(res, fam), variant
        res = reveal_bound(fam, BoundMode("averaged", samples=1500), seed=3)
        assert res.stderr is not None
        assert bound_holds(res, fam)


def test_explicit_order_weights():
    fam = diagonal_pair_family(3)
    orders = (((0, 1, 2), Fraction(1, 2)), ((2, 1, 0), Fraction(1, 2)))
    res = reveal_bound(fam, BoundMode("averaged", orders=orders))
    assert bound_holds(res, fam)
    with pytest.raises(FamilyError, match="sum to 1"):
        BoundMode("averaged", orders=(((0, 1, 2), Fraction(1, 3)),))


def test_exact_mode_component_limit():
    grid = random_tangled_grid(5, 1)  # 10 components
    fam = downset_top_family(grid)
    with pytest.raises(FamilyError, match="Monte Carlo"):
        reveal_bound(fam, BoundMode("averaged"))
    res = reveal_bound(fam, BoundMode("averaged", samples=300), seed=1)
    assert bound_holds(res, fam)


def test_downset_family_size_matches_count():
    grid = random_tangled_grid(4, 8)
    fam = downset_top_family(grid)
    assert len(fam.members) == count_downsets(grid.poset)


def test_empty_and_invalid_families():
    with pytest.raises(FamilyError):
        TupleFamily(((0,),), ((0,), (0,)))
    with pytest.raises(FamilyError, match="outside component"):
        TupleFamily(((0,),), ((1,),))


def test_perfect_matching_family_and_bregman():
    g = BipartiteGraph(3, 3, frozenset((u, v) for u in range(3) for v in range(3)))
    fam = perfect_matching_family(g)
    assert len(fam.members) == 6
    assert abs(bregman_log_bound(g) - math.log(6)) < 1e-12
    single = BipartiteGraph(2, 2, frozenset({(0, 0), (1, 1)}))
    assert count_perfect_matchings(single) == 1
    assert bregman_log_bound(single) == 0.0


def test_bregman_on_random_graphs():
    rng = Xoshiro256StarStar(4)
    half = bernoulli_threshold(Fraction(1, 2))
    for _ in range(60):
        g = random_bipartite_graph(5, 5, half, rng)
        pm = count_perfect_matchings(g)
        if pm:
            assert math.log(pm) <= bregman_log_bound(g) + 1e-9


def test_unequal_sides_rejected():
    g = BipartiteGraph(2, 3, frozenset({(0, 0), (1, 1)}))
    with pytest.raises(FamilyError, match="equal side sizes"):
        perfect_matching_family(g)
