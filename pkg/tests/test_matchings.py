import pytest

from smcensus.instances import PreferenceProfile, instance_I2, random_instance
from smcensus.matchings import (enumerate_stable_bruteforce, gale_shapley,
                                unstable_pairs)


def test_single_job_market():
    profile = PreferenceProfile(1, ((0,),), ((0,),))
    assert gale_shapley(profile, "jobs") == (0,)
    assert unstable_pairs(profile, (0,)) == []
    assert enumerate_stable_bruteforce(profile) == {(0,)}


def test_fixture_optimal_matchings():
    profile = instance_I2()
    assert gale_shapley(profile, "jobs") == (0, 1)
    assert gale_shapley(profile, "applicants") == (1, 0)
    assert enumerate_stable_bruteforce(profile) == {(0, 1), (1, 0)}
    assert unstable_pairs(profile, (0, 1)) == []


def test_blocking_pair_detected():
    # both jobs want applicant 0 first, both applicants want job 0 first
    profile = PreferenceProfile(2, ((0, 1), (0, 1)), ((0, 1), (0, 1)))
    assert (0, 0) in unstable_pairs(profile, (1, 0))


def test_deferred_acceptance_output_is_stable():
    for seed in range(200):
        profile = random_instance(2 + seed % 7, seed)
        for side in ("jobs", "applicants"):
            assert unstable_pairs(profile, gale_shapley(profile, side)) == []


def test_both_optimal_matchings_are_enumerated():
    for seed in range(40):
        profile = random_instance(2 + seed % 4, seed)
        stable = enumerate_stable_bruteforce(profile)
        assert gale_shapley(profile, "jobs") in stable
        assert gale_shapley(profile, "applicants") in stable


def test_jobs_weakly_prefer_job_proposing_outcome():
    for seed in range(30):
        profile = random_instance(5, seed)
        best = gale_shapley(profile, "jobs")
        rank = {(u, v): profile.job_prefs[u].index(v)
                for u in range(5) for v in range(5)}
        for other in enumerate_stable_bruteforce(profile):
            for u in range(5):
                assert rank[(u, best[u])] <= rank[(u, other[u])]


def test_bruteforce_cap():
    with pytest.raises(ValueError, match="above brute-force cap"):
        enumerate_stable_bruteforce(random_instance(10, 0))


def test_matching_validation():
    profile = instance_I2()
    with pytest.raises(ValueError, match="not a bijection"):
        unstable_pairs(profile, (0, 0))


def test_invalid_side():
    with pytest.raises(ValueError, match="proposing_side"):
        gale_shapley(instance_I2(), "managers")
