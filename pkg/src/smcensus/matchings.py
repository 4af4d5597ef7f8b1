"""Deferred acceptance, stability checking, and brute-force enumeration.

A matching is a tuple mapping job index -> applicant index.  The
brute-force enumerator is the ground-truth oracle for everything the
rotation machinery produces; it is capped at n <= 9 by default.
"""

from __future__ import annotations

from itertools import permutations

from .instances import PreferenceProfile, applicant_ranks, job_ranks

Matching = tuple[int, ...]

BRUTE_FORCE_CAP = 9


def validate_matching(matching: Matching, n: int) -> None:
    if sorted(matching) != list(range(n)):
        raise ValueError(f"matching {matching} is not a bijection on 0..{n - 1}")


def gale_shapley(profile: PreferenceProfile, proposing_side: str = "jobs") -> Matching:
    """Deferred acceptance; proposing_side in {'jobs', 'applicants'}.

    With jobs proposing this returns the job-optimal stable matching, the
    starting point for all rotation eliminations.
    """
    if proposing_side == "jobs":
        prop_prefs, recv_prefs = profile.job_prefs, profile.applicant_prefs
    elif proposing_side == "applicants":
        prop_prefs, recv_prefs = profile.applicant_prefs, profile.job_prefs
    else:
        raise ValueError("proposing_side must be 'jobs' or 'applicants'")

    n = profile.n
    recv_rank = [[0] * n for _ in range(n)]
    for r in range(n):
        for pos, p in enumerate(recv_prefs[r]):
            recv_rank[r][p] = pos

    next_choice = [0] * n
    recv_match = [-1] * n
    prop_match = [-1] * n
    free = list(range(n - 1, -1, -1))
    while free:
        p = free.pop()
        r = prop_prefs[p][next_choice[p]]
        next_choice[p] += 1
        cur = recv_match[r]
        if cur == -1:
            recv_match[r] = p
            prop_match[p] = r
        elif recv_rank[r][p] < recv_rank[r][cur]:
            recv_match[r] = p
            prop_match[p] = r
            prop_match[cur] = -1
            free.append(cur)
        else:
            free.append(p)

    if proposing_side == "jobs":
        return tuple(prop_match)
    return tuple(recv_match[u] for u in range(n))


def unstable_pairs(profile: PreferenceProfile, matching: Matching) -> list[tuple[int, int]]:
    """All blocking pairs (job, applicant), sorted; empty iff stable."""
    n = profile.n
    validate_matching(matching, n)
    jrank = job_ranks(profile)
    arank = applicant_ranks(profile)
    partner_of_applicant = [0] * n
    for u, v in enumerate(matching):
        partner_of_applicant[v] = u
    out = []
    for u in range(n):
        mu = matching[u]
        for v in range(n):
            if v == mu:
                continue
            if jrank[u][v] < jrank[u][mu] and arank[v][u] < arank[v][partner_of_applicant[v]]:
                out.append((u, v))
    return out


def is_stable(profile: PreferenceProfile, matching: Matching) -> bool:
    return not _has_blocking_pair(job_ranks(profile), applicant_ranks(profile),
                                  profile.job_prefs, matching)


def _has_blocking_pair(jrank, arank, job_prefs, matching) -> bool:
    # early-exit scan: for each job, only applicants it prefers to its partner
    n = len(matching)
    partner_of_applicant = [0] * n
    for u, v in enumerate(matching):
        partner_of_applicant[v] = u
    for u in range(n):
        cur_rank = jrank[u][matching[u]]
        prefs_u = job_prefs[u]
        for pos in range(cur_rank):
            v = prefs_u[pos]
            if arank[v][u] < arank[v][partner_of_applicant[v]]:
                return True
    return False


def enumerate_stable_bruteforce(profile: PreferenceProfile,
                                cap: int = BRUTE_FORCE_CAP) -> set[Matching]:
    """All stable matchings by filtering every perfect matching (n! scan).

    Permutations are visited in lexicographic order; the cap marks the
    oracle boundary (default 9).
    """
    n = profile.n
    if n > cap:
        raise ValueError(f"n={n} above brute-force cap {cap}")
    jrank = job_ranks(profile)
    arank = applicant_ranks(profile)
    job_prefs = profile.job_prefs
    out = set()
    for perm in permutations(range(n)):
        if not _has_blocking_pair(jrank, arank, job_prefs, perm):
            out.add(perm)
    return out
