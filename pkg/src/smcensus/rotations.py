"""Rotations of stable matchings and the rotation poset.

A rotation is a cyclic list of matched edges whose elimination re-matches
each job to the next applicant in the cycle, producing another stable
matching.  Exploring all elimination sequences from the job-optimal
matching yields the rotation poset; its downsets are in bijection with
the stable matchings, which is the central equality this module exposes
and the test suite verifies against brute force.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import posets
from .instances import PreferenceProfile, applicant_ranks, job_ranks
from .matchings import Matching, gale_shapley, unstable_pairs, validate_matching

STATE_CAP = 10 ** 6


class NotExposedError(ValueError):
    pass


class StateCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class Rotation:
    """Canonical ordered edge cycle: the smallest job index comes first."""

    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        k = len(self.edges)
        if k < 2:
            raise ValueError("a rotation has at least 2 edges")
        jobs = [u for u, _ in self.edges]
        apps = [v for _, v in self.edges]
        if len(set(jobs)) != k or len(set(apps)) != k:
            raise ValueError("rotation jobs and applicants must be distinct")
        if self.edges[0][0] != min(jobs):
            raise ValueError("rotation not in canonical form (smallest job first)")

    @property
    def jobs(self) -> tuple[int, ...]:
        return tuple(u for u, _ in self.edges)

    @property
    def applicants(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.edges)


def canonical_rotation(edges) -> Rotation:
    """Shift a cyclic edge list so the smallest job index comes first."""
    edges = list(edges)
    shift = min(range(len(edges)), key=lambda i: edges[i][0])
    return Rotation(tuple(edges[shift:] + edges[:shift]))


def exposed_rotations(profile: PreferenceProfile, matching: Matching) -> list[Rotation]:
    """All rotations exposed in a stable matching, via the successor construction.

    For each job u matched to v, the successor applicant is the first w
    below v on u's list preferring u to its own partner; cycles of
    u -> partner(successor(u)) are exactly the exposed rotations.
    """
    n = profile.n
    validate_matching(matching, n)
    bad = unstable_pairs(profile, matching)
    if bad:
        raise NotExposedError(f"matching is unstable, e.g. blocking pair {bad[0]}")
    arank = applicant_ranks(profile)
    partner = [0] * n
    for u, v in enumerate(matching):
        partner[v] = u

    jrank = job_ranks(profile)
    succ = [-1] * n
    for u in range(n):
        for pos in range(jrank[u][matching[u]] + 1, n):
            w = profile.job_prefs[u][pos]
            if arank[w][u] < arank[w][partner[w]]:
                succ[u] = partner[w]
                break

    out = []
    color = [0] * n  # 0 unvisited, 1 on current walk, 2 done
    for start in range(n):
        if color[start]:
            continue
        walk = []
        pos_in_walk: dict[int, int] = {}
        u = start
        while u != -1 and color[u] == 0:
            color[u] = 1
            pos_in_walk[u] = len(walk)
            walk.append(u)
            u = succ[u]
        if u != -1 and color[u] == 1:
            cycle = walk[pos_in_walk[u]:]
            out.append(canonical_rotation([(x, matching[x]) for x in cycle]))
        for x in walk:
            color[x] = 2
    out.sort(key=lambda r: r.edges)
    return out


def _apply_rotation(matching: Matching, rotation: Rotation) -> Matching:
    new = list(matching)
    k = len(rotation.edges)
    for i, (u, _) in enumerate(rotation.edges):
        new[u] = rotation.edges[(i + 1) % k][1]
    return tuple(new)


def eliminate(matching: Matching, rotation: Rotation,
              profile: PreferenceProfile | None = None) -> Matching:
    """Re-match each rotation job to the next applicant in the cycle.

    Requires the rotation's edges to be present in the matching; when a
    profile is supplied the full exposure condition is enforced and the
    result is asserted stable.
    """
    for u, v in rotation.edges:
        if matching[u] != v:
            raise NotExposedError(f"edge ({u},{v}) not in matching")
    if profile is not None and rotation not in exposed_rotations(profile, matching):
        raise NotExposedError(f"rotation {rotation.edges} not exposed")
    new = _apply_rotation(matching, rotation)
    if profile is not None:
        assert not unstable_pairs(profile, new), "elimination broke stability"
    return new


@dataclass(frozen=True)
class RotationPoset:
    """All rotations of an instance with their elimination order.

    below[t] is the bitmask of rotations strictly below rotation t;
    m_chains[u] / w_chains[v] list the rotations involving job u /
    applicant v, bottom to top.
    """

    n: int
    rotations: tuple[Rotation, ...]
    below: tuple[int, ...]
    m_chains: tuple[tuple[int, ...], ...]
    w_chains: tuple[tuple[int, ...], ...]

    def leq(self, i: int, j: int) -> bool:
        return i == j or bool(self.below[j] >> i & 1)


def to_finite_poset(rposet: RotationPoset) -> posets.FinitePoset:
    return posets.poset_from_below(len(rposet.rotations), list(rposet.below))


def build_rotation_poset(profile: PreferenceProfile,
                         state_cap: int = STATE_CAP) -> RotationPoset:
    """Breadth-first exploration of all elimination sequences from the
    job-optimal matching; the order is read off the reachable
    eliminated-sets (rho below rho' iff every reachable set containing
    rho' contains rho) and cross-checked to be a lattice of downsets.
    """
    n = profile.n
    mu0 = gale_shapley(profile, "jobs")

    rot_ids: dict[tuple, int] = {}
    rotations: list[Rotation] = []
    states: dict[int, Matching] = {0: mu0}  # eliminated-set bitmask -> matching
    frontier = [0]
    while frontier:
        next_frontier = []
        for mask in frontier:
            matching = states[mask]
            for rot in exposed_rotations(profile, matching):
                rid = rot_ids.get(rot.edges)
                if rid is None:
                    rid = len(rotations)
                    rot_ids[rot.edges] = rid
                    rotations.append(rot)
                new_mask = mask | (1 << rid)
                new_matching = _apply_rotation(matching, rot)
                assert not unstable_pairs(profile, new_matching), \
                    "elimination produced an unstable matching"
                seen = states.get(new_mask)
                if seen is None:
                    if len(states) >= state_cap:
                        raise StateCapError(f"more than {state_cap} lattice states")
                    states[new_mask] = new_matching
                    next_frontier.append(new_mask)
                elif seen != new_matching:
                    raise AssertionError("same eliminated-set reached two matchings")
        frontier = next_frontier

    r = len(rotations)
    full = (1 << r) - 1
    below_incl = [full] * r  # AND of all reached sets containing t
    for mask in states:
        for t in posets._bits(mask):
            below_incl[t] &= mask
    below = [below_incl[t] & ~(1 << t) for t in range(r)]

    for i in range(r):
        for j in posets._bits(below[i]):
            if below[j] >> i & 1:
                raise AssertionError("derived elimination order is not antisymmetric")

    # reached sets must be exactly the downsets of the derived order
    reached = set(states)
    for mask in reached:
        for t in posets._bits(mask):
            if below[t] & ~mask:
                raise AssertionError("reached set is not downward closed")
    fp = posets.poset_from_below(r, below)
    ideals = set(posets.enumerate_downset_masks(fp))
    if ideals != reached:
        raise AssertionError("reached sets differ from the downsets of the derived order")

    def chain(ids: list[int]) -> tuple[int, ...]:
        return tuple(sorted(ids, key=lambda t: (below[t].bit_count(), t)))

    m_chains = tuple(chain([t for t in range(r) if u in rotations[t].jobs])
                     for u in range(n))
    w_chains = tuple(chain([t for t in range(r) if v in rotations[t].applicants])
                     for v in range(n))
    return RotationPoset(n, tuple(rotations), tuple(below), m_chains, w_chains)


def stable_matching_bijection(profile: PreferenceProfile,
                              state_cap: int = STATE_CAP) -> dict[frozenset[int], Matching]:
    """Explicit downset -> stable matching map, eliminating each downset's
    rotations in a linear extension order with full exposure checking."""
    rposet = build_rotation_poset(profile, state_cap)
    mu0 = gale_shapley(profile, "jobs")
    fp = to_finite_poset(rposet)
    out: dict[frozenset[int], Matching] = {}
    for mask in posets.enumerate_downset_masks(fp):
        ids = sorted(posets._bits(mask),
                     key=lambda t: (rposet.below[t].bit_count(), t))
        matching = mu0
        for t in ids:
            matching = eliminate(matching, rposet.rotations[t], profile)
        out[frozenset(ids)] = matching
    if len(set(out.values())) != len(out):
        raise AssertionError("downset -> matching map is not injective")
    return out


def enumerate_stable_via_rotations(profile: PreferenceProfile,
                                   state_cap: int = STATE_CAP) -> set[Matching]:
    return set(stable_matching_bijection(profile, state_cap).values())


@dataclass
class StructureReport:
    """Pass/fail per structural claim, with failure witnesses."""

    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, list] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, ok: bool, witness=None) -> None:
        self.checks[name] = self.checks.get(name, True) and ok
        if not ok:
            self.witnesses.setdefault(name, []).append(witness)


def check_structure(rposet: RotationPoset) -> StructureReport:
    """Verify the structural properties of a rotation poset.

    (a) rotations sharing a vertex form a chain; (b) an edge appears in at
    most one rotation; (c) each rotation lies on equally many m- and
    w-chains, at least two; (d) paired chains re-pair at exactly one other
    rotation, consecutively on both, unless the rotation tops or bottoms
    both chains; (e) no chain is paired with two different chains at the
    same two rotations; (f) every chain has at most n-1 rotations.
    """
    rep = StructureReport()
    r = len(rposet.rotations)

    for side, chains in (("m", rposet.m_chains), ("w", rposet.w_chains)):
        for vid, ch in enumerate(chains):
            for a in range(len(ch)):
                for b in range(a + 1, len(ch)):
                    ok = rposet.leq(ch[a], ch[b]) or rposet.leq(ch[b], ch[a])
                    rep.record("vertex_chains", ok, (side, vid, ch[a], ch[b]))
    rep.checks.setdefault("vertex_chains", True)

    edge_seen: dict[tuple[int, int], int] = {}
    for t in range(r):
        for e in rposet.rotations[t].edges:
            if e in edge_seen and edge_seen[e] != t:
                rep.record("edge_uniqueness", False, (e, edge_seen[e], t))
            edge_seen[e] = t
    rep.checks.setdefault("edge_uniqueness", True)

    for t in range(r):
        n_m = sum(1 for ch in rposet.m_chains if t in ch)
        n_w = sum(1 for ch in rposet.w_chains if t in ch)
        rep.record("chain_counts", n_m == n_w and n_m >= 2, (t, n_m, n_w))
    rep.checks.setdefault("chain_counts", True)

    # pairing events: at each rotation, job u is paired with its current
    # partner's chain and with its next partner's chain
    events: dict[tuple[int, int], list[int]] = {}
    for t in range(r):
        edges = rposet.rotations[t].edges
        k = len(edges)
        for i in range(k):
            u = edges[i][0]
            for v in (edges[i][1], edges[(i + 1) % k][1]):
                events.setdefault((u, v), []).append(t)

    def consecutive(ch: tuple[int, ...], a: int, b: int) -> bool:
        ia, ib = ch.index(a), ch.index(b)
        return abs(ia - ib) == 1

    for (u, v), ts in events.items():
        mch, wch = rposet.m_chains[u], rposet.w_chains[v]
        if len(ts) == 1:
            t = ts[0]
            at_top = mch[-1] == t and wch[-1] == t
            at_bottom = mch[0] == t and wch[0] == t
            rep.record("pairing_consecutive", at_top or at_bottom, (u, v, t))
        elif len(ts) == 2:
            a, b = ts
            ok = consecutive(mch, a, b) and consecutive(wch, a, b)
            rep.record("pairing_consecutive", ok, (u, v, a, b))
        else:
            rep.record("pairing_consecutive", False, (u, v, tuple(ts)))
    rep.checks.setdefault("pairing_consecutive", True)

    pair_sets = {key: frozenset(ts) for key, ts in events.items() if len(ts) == 2}
    for (u, v), ts in pair_sets.items():
        for (u2, v2), ts2 in pair_sets.items():
            if (u2, v2) == (u, v) or ts2 != ts:
                continue
            if u2 == u or v2 == v:
                rep.record("pairing_moreover", False, ((u, v), (u2, v2), tuple(ts)))
    rep.checks.setdefault("pairing_moreover", True)

    for side, chains in (("m", rposet.m_chains), ("w", rposet.w_chains)):
        for vid, ch in enumerate(chains):
            rep.record("chain_length", len(ch) <= rposet.n - 1, (side, vid, len(ch)))
    rep.checks.setdefault("chain_length", True)

    return rep


def poset_to_json(rposet: RotationPoset) -> dict:
    fp = to_finite_poset(rposet)
    return {
        "n": rposet.n,
        "rotations": [[list(e) for e in rot.edges] for rot in rposet.rotations],
        "covers": [list(c) for c in fp.covers],
        "m_chains": [list(c) for c in rposet.m_chains],
        "w_chains": [list(c) for c in rposet.w_chains],
    }
