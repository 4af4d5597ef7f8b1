"""Gap distributions behind the downset-counting bounds.

Two families of random gap lengths are implemented exactly and by
sampling:

* cyclic gap: n+1 points on a circle with a marked point t; choosing l of
  them uniformly splits the circle into l arcs, and the gap is the length
  of the arc containing t.  Pmf: k * C(n-k, l-2) / C(n+1, l).
* line gap: every integer belongs to a random set independently with
  probability x, and the gap is the length of the interval of unmarked
  ground between the chosen points around 0.  The 'plain' variant uses
  only that set (pmf k x^2 (1-x)^(k-1)); the 'extended' variant adds four
  extra indicator slots at {-1, 0, 1, 2}, plus a shortcut branch that
  forces gap 1 with probability x.

The module also hosts the stochastic-dominance check of revealed-chain
option counts against the cyclic gap law, a Jensen inequality helper, and
the Monte Carlo comparison of the extended gap under correlated versus
independent slot indicators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial

import numpy as np

from .counting import TupleFamily, downset_top_family
from .posets import TangledGrid
from .rng import Xoshiro256StarStar, XoshiroLanes, bernoulli_threshold

PLAIN = "plain"
EXTENDED = "extended"

MC_LANES = 1024
SLOTS = (-1, 0, 1, 2)


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class Pmf:
    """Finite support pmf; probabilities are Fractions or floats."""

    support: tuple[tuple[int, object], ...]

    def validate(self, tol: float = 1e-12) -> None:
        total = sum(p for _, p in self.support)
        if any(p < 0 for _, p in self.support):
            raise DistributionError("negative probability")
        if isinstance(total, Fraction):
            if total != 1:
                raise DistributionError(f"pmf sums to {total}, not 1")
        elif abs(total - 1.0) > tol:
            raise DistributionError(f"pmf sums to {total}")

    def expectation(self):
        return sum(k * p for k, p in self.support)

    def log_expectation(self) -> float:
        return math.fsum(float(p) * math.log(k) for k, p in self.support)

    def cdf(self) -> list[tuple[int, object]]:
        out = []
        acc = 0
        for k, p in sorted(self.support):
            acc += p
            out.append((k, acc))
        return out


# ---------------------------------------------------------------- cyclic gap

def cyclic_gap_pmf(n: int, l: int) -> Pmf:
    """Exact arc-length law for l chosen points among n+1 cyclic positions."""
    if not 2 <= l <= n:
        raise DistributionError(f"need 2 <= l <= n, got l={l}, n={n}")
    denom = comb(n + 1, l)
    support = tuple((k, Fraction(k * comb(n - k, l - 2), denom))
                    for k in range(1, n + 1) if comb(n - k, l - 2) > 0)
    pmf = Pmf(support)
    pmf.validate()
    return pmf


def cyclic_gap_pmf_bruteforce(n: int, l: int) -> Pmf:
    """Oracle: enumerate all C(n+1, l) choices on the circle directly."""
    if not 2 <= l <= n:
        raise DistributionError(f"need 2 <= l <= n, got l={l}, n={n}")
    counts: dict[int, int] = {}
    total = 0
    for chosen in combinations(range(n + 1), l):
        total += 1
        k = _arc_containing_zero(chosen, n)
        counts[k] = counts.get(k, 0) + 1
    support = tuple((k, Fraction(c, total)) for k, c in sorted(counts.items()))
    return Pmf(support)


def _arc_containing_zero(chosen: tuple[int, ...], n: int) -> int:
    # chosen is sorted ascending within 0..n; arcs are [a_j, a_{j+1})
    if chosen[0] == 0:
        return chosen[1] if len(chosen) > 1 else n + 1
    return (n + 1 - chosen[-1]) + chosen[0]


@dataclass(frozen=True)
class CyclicGapMoments:
    expectation: Fraction
    given_marked_unchosen: Fraction
    given_marked_chosen: Fraction


def cyclic_gap_expectation(n: int, l: int) -> CyclicGapMoments:
    """E of the cyclic gap, overall and conditioned on whether the marked
    point was among the chosen; asserts the 2(n+1)/(l+1) ceiling."""
    if not 2 <= l <= n:
        raise DistributionError(f"need 2 <= l <= n, got l={l}, n={n}")
    # split counts: a length-k arc containing the mark starts at the mark
    # (mark chosen) or at one of k-1 earlier points (mark unchosen)
    e_chosen = Fraction(
        sum(k * comb(n - k, l - 2) for k in range(1, n + 1)), comb(n, l - 1))
    e_unchosen = Fraction(
        sum(k * (k - 1) * comb(n - k, l - 2) for k in range(1, n + 1)), comb(n, l))
    e_all = Fraction(
        sum(k * k * comb(n - k, l - 2) for k in range(1, n + 1)), comb(n + 1, l))
    assert e_all <= Fraction(2 * (n + 1), l + 1), "expectation ceiling violated"
    return CyclicGapMoments(e_all, e_unchosen, e_chosen)


class CyclicGapSampler:
    """Deterministic sample stream of cyclic gaps."""

    def __init__(self, n: int, l: int, seed: int):
        if not 2 <= l <= n:
            raise DistributionError(f"need 2 <= l <= n, got l={l}, n={n}")
        self.n, self.l = n, l
        self._rng = Xoshiro256StarStar(seed)

    def next(self) -> int:
        chosen = self._rng.sample_range(self.n + 1, self.l)
        return _arc_containing_zero(tuple(chosen), self.n)

    def take(self, count: int) -> list[int]:
        return [self.next() for _ in range(count)]


def sample_cyclic_gap(n: int, l: int, seed: int, count: int) -> list[int]:
    return CyclicGapSampler(n, l, seed).take(count)


# ------------------------------------------------------------------ line gap

def _check_x(x) -> None:
    if not 0 < x < 1:
        raise DistributionError(f"x={x} outside (0, 1)")


def line_gap_pmf(x, k: int, variant: str = PLAIN):
    """Point mass at gap length k; exact when x is a Fraction.

    plain: k x^2 (1-x)^(k-1) for k >= 1.
    extended: piecewise polynomials for k >= 2; the k = 1 mass combines
    the probability-x shortcut with both neighbours of the origin being
    marked.
    """
    _check_x(x)
    if k < 1:
        raise DistributionError("k must be >= 1")
    one = Fraction(1) if isinstance(x, Fraction) else 1.0
    q = one - x
    if variant == PLAIN:
        return k * x * x * q ** (k - 1)
    if variant != EXTENDED:
        raise DistributionError(f"unknown variant {variant!r}")
    c = one - q * q
    if k == 1:
        return x + q * c * c
    if k == 2:
        return 2 * q ** 3 * c ** 2
    if k == 3:
        return q ** 5 * c ** 2 + 2 * q ** 5 * c * x
    return 2 * q ** (k + 2) * c * x + 2 * q ** (k + 3) * c * x \
        + (k - 4) * q ** (k + 4) * x * x


def line_gap_tail(x, K: int, variant: str = PLAIN):
    """Exact mass of gap lengths above K (closed forms of the geometric tails)."""
    _check_x(x)
    one = Fraction(1) if isinstance(x, Fraction) else 1.0
    q = one - x
    if variant == PLAIN:
        if K < 1:
            raise DistributionError("K must be >= 1")
        return q ** K * (K * x + 1)
    if variant != EXTENDED:
        raise DistributionError(f"unknown variant {variant!r}")
    if K < 3:
        raise DistributionError("extended tail needs K >= 3")
    c = one - q * q
    return 2 * c * q ** (K + 3) + 2 * c * q ** (K + 4) \
        + q ** (K + 5) * ((K - 3) * x + q)


def line_gap_total(x, K: int, variant: str = PLAIN):
    """Sum of the pmf through K plus the exact tail; equals 1."""
    return sum(line_gap_pmf(x, k, variant) for k in range(1, K + 1)) \
        + line_gap_tail(x, K, variant)


def line_gap_log_mean(x: float, variant: str = PLAIN, rel_tail: float = 1e-14) -> float:
    """E[log gap], truncated where the remaining mass is negligible."""
    _check_x(x)
    total = 0.0
    k = 2
    while True:
        total += math.log(k) * line_gap_pmf(x, k, variant)
        if k > 4 and line_gap_tail(x, k, variant) * math.log(k + 50) < rel_tail:
            break
        k += 1
    return total


class LineGapSampler:
    """Deterministic line-gap stream; the integer line is truncated at a
    width ceil(40/x) window (untouched-tail mass below 1e-12)."""

    def __init__(self, x: float, variant: str, seed: int):
        _check_x(x)
        if variant not in (PLAIN, EXTENDED):
            raise DistributionError(f"unknown variant {variant!r}")
        self.x = x
        self.variant = variant
        self.window = math.ceil(40 / x)
        self._thr = bernoulli_threshold(Fraction(x))
        self._rng = Xoshiro256StarStar(seed)

    def _scan(self, limit: int) -> int:
        """Steps until the first marked slot, capped at limit (>= 1)."""
        for step in range(1, limit + 1):
            if self._rng.bernoulli(self._thr):
                return step
        return limit

    def next(self) -> int:
        rng = self._rng
        if self.variant == PLAIN:
            down = 0 if rng.bernoulli(self._thr) else self._scan(self.window)
            up = self._scan(self.window)
            return down + up
        if rng.bernoulli(self._thr):  # shortcut branch
            return 1
        in_a = {j: rng.bernoulli(self._thr) for j in SLOTS}
        in_b = {j: rng.bernoulli(self._thr) for j in SLOTS}
        if in_a[0] or in_b[0]:
            lo = 0
        elif in_a[-1] or in_b[-1]:
            lo = -1
        else:
            lo = -1 - self._scan(self.window)
        if in_a[1] or in_b[1]:
            hi = 1
        elif in_a[2] or in_b[2]:
            hi = 2
        else:
            hi = 2 + self._scan(self.window)
        return hi - lo

    def take(self, count: int) -> list[int]:
        return [self.next() for _ in range(count)]


def sample_line_gap(x: float, variant: str, seed: int, count: int) -> list[int]:
    return LineGapSampler(x, variant, seed).take(count)


# ------------------------------------------------------------- dominance

@dataclass
class DominanceReport:
    chain_index: int
    l: int
    passed: bool
    witnesses: list

    def to_json(self) -> dict:
        return {"chain": self.chain_index, "l": self.l,
                "passed": self.passed, "witnesses": self.witnesses[:5]}


def dominance_check(grid: TangledGrid, chain_index: int, l: int,
                    family: TupleFamily | None = None) -> DominanceReport:
    """Check that the option count for one chain, conditioned on exactly l
    opposite-side chains being revealed first, is dominated by the cyclic
    gap law: Pr[X <= y] >= Pr[gap <= y] for every y, for every downset.

    The conditional law over uniform reveal orders weights a prefix set T
    by |T|! (2n-1-|T|)!; option counts use everything revealed, which only
    sharpens them.  All comparisons are exact rationals.
    """
    n = grid.n
    if not 0 <= chain_index < 2 * n:
        raise DistributionError("chain index out of range")
    if not 2 <= l <= n:
        raise DistributionError(f"need 2 <= l <= n, got l={l}")
    fam = family if family is not None else downset_top_family(grid)
    hists = _conditional_option_histograms(fam, chain_index, n)
    return _dominance_report(n, chain_index, l, hists[l])


def _dominance_report(n: int, chain_index: int, l: int,
                      hists: list[dict[int, int]]) -> DominanceReport:
    ref_cdf = cyclic_gap_pmf(n, l).cdf()
    witnesses = []
    for mi, hist in enumerate(hists):
        total = sum(hist.values())
        acc = 0
        hist_sorted = sorted(hist.items())
        hi = 0
        for y, ref_p in ref_cdf:
            while hi < len(hist_sorted) and hist_sorted[hi][0] <= y:
                acc += hist_sorted[hi][1]
                hi += 1
            if Fraction(acc, total) < ref_p:
                witnesses.append((mi, y, Fraction(acc, total), ref_p))
    return DominanceReport(chain_index, l, not witnesses, witnesses)


def _conditional_option_histograms(fam: TupleFamily, chain_index: int, n: int):
    """hist[l][member] = {option count: integer weight} over prefixes with
    exactly l opposite-side chains revealed before chain_index."""
    from .counting import _counts_for_prefix

    nch = 2 * n
    opposite = set(range(n, nch)) if chain_index < n else set(range(n))
    others = [j for j in range(nch) if j != chain_index]
    hists: dict[int, list[dict[int, int]]] = {
        l: [{} for _ in fam.members] for l in range(0, n + 1)}
    for size in range(len(others) + 1):
        w = factorial(size) * factorial(len(others) - size)
        for T in combinations(others, size):
            l = sum(1 for j in T if j in opposite)
            row = hists[l]
            for mi, c in enumerate(_counts_for_prefix(fam, chain_index, T)):
                row[mi][c] = row[mi].get(c, 0) + w
    return hists


def dominance_check_grid(grid: TangledGrid) -> list[DominanceReport]:
    """dominance_check for every chain and every l, sharing one family and
    one histogram pass per chain."""
    fam = downset_top_family(grid)
    out = []
    for chain_index in range(2 * grid.n):
        hists = _conditional_option_histograms(fam, chain_index, grid.n)
        for l in range(2, grid.n + 1):
            out.append(_dominance_report(grid.n, chain_index, l, hists[l]))
    return out


# ------------------------------------------------------ Jensen pair check

def jensen_pair_check(a0, a1, a2, x, tol: float = 1e-12):
    """lhs/rhs of the two-indicator Jensen inequality; pass iff lhs >= rhs - tol."""
    if a0 <= 0 or a1 <= 0 or a2 <= 0:
        raise DistributionError("a0, a1, a2 must be positive")
    if not 0 <= x <= 1:
        raise DistributionError("x must lie in [0, 1]")
    a0, a1, a2, x = float(a0), float(a1), float(a2), float(x)
    lhs = (x * x * math.log(a0)
           + x * (1 - x) * (math.log(a0 + a1) + math.log(a0 + a2))
           + (1 - x) * (1 - x) * math.log(a0 + a1 + a2))
    rhs = x * math.log(a0) + (1 - x) * math.log(a0 + a1 + a2)
    return lhs, rhs, lhs >= rhs - tol


# ----------------------------------------- correlated extended-gap check

def legal_identification_patterns() -> tuple[tuple[tuple[int, int], ...], ...]:
    """All slot identification patterns keeping adjacent slots independent."""
    return ((), ((-1, 1),), ((-1, 2),), ((0, 2),), ((-1, 1), (0, 2)))


def _pattern_classes(pattern) -> dict[int, int]:
    """Map each slot to its class representative; reject adjacent identifications."""
    parent = {j: j for j in SLOTS}

    def find(j):
        while parent[j] != j:
            j = parent[j]
        return j

    for a, b in pattern:
        if a not in parent or b not in parent:
            raise DistributionError(f"identification ({a},{b}) outside slots")
        parent[find(a)] = find(b)
    for j in (-1, 0, 1):
        if find(j) == find(j + 1):
            raise DistributionError(
                f"slots {j} and {j + 1} are adjacent and must stay independent")
    return {j: find(j) for j in SLOTS}


@dataclass
class GapDependenceResult:
    pattern: tuple
    x: float
    samples: int
    dependent_mean: float
    independent_mean: float
    diff_mean: float
    diff_stderr: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "pattern": [list(p) for p in self.pattern],
            "x": self.x,
            "samples": self.samples,
            "dependent_mean": self.dependent_mean,
            "independent_mean": self.independent_mean,
            "diff_mean": self.diff_mean,
            "diff_stderr": self.diff_stderr,
            "passed": self.passed,
        }


def gap_dependence_check(x: float, pattern, seed: int,
                         samples: int = 10 ** 6) -> GapDependenceResult:
    """Paired Monte Carlo estimate of E[log gap] for the extended variant
    with identified slots versus fully independent slots.

    Both estimates share the branch draw, the base marking and the slot
    uniforms (an identified class reuses its representative's uniform), so
    the difference estimator is tight; pass iff the dependent mean does
    not exceed the independent one by more than 4 standard errors of the
    paired difference.
    """
    _check_x(x)
    classes = _pattern_classes(tuple(pattern))
    thr = np.uint64(bernoulli_threshold(Fraction(x)))
    window = math.ceil(40 / x)
    lanes = XoshiroLanes(seed, MC_LANES)
    batches = (samples + MC_LANES - 1) // MC_LANES
    total = batches * MC_LANES

    sum_d = sum_i = 0.0
    sum_diff = sum_diff2 = 0.0
    for _ in range(batches):
        branch = lanes.next_u64() < thr
        in_a = {j: lanes.next_u64() < thr for j in SLOTS}
        slot_u = {j: lanes.next_u64() for j in SLOTS}
        b_ind = {j: slot_u[j] < thr for j in SLOTS}
        b_dep = {j: slot_u[classes[j]] < thr for j in SLOTS}

        down = _vector_scan(lanes, thr, window)  # first mark below slot -1
        up = _vector_scan(lanes, thr, window)    # first mark above slot 2

        n_ind = _gap_from_slots(in_a, b_ind, down, up, branch)
        n_dep = _gap_from_slots(in_a, b_dep, down, up, branch)
        log_i = np.log(n_ind)
        log_d = np.log(n_dep)
        diff = log_d - log_i
        sum_d += float(log_d.sum())
        sum_i += float(log_i.sum())
        sum_diff += float(diff.sum())
        sum_diff2 += float((diff * diff).sum())

    mean_d = sum_d / total
    mean_i = sum_i / total
    mean_diff = sum_diff / total
    var_diff = max(sum_diff2 / total - mean_diff * mean_diff, 0.0)
    stderr = math.sqrt(var_diff / total)
    passed = mean_diff <= 4.0 * stderr
    return GapDependenceResult(tuple(pattern), x, total, mean_d, mean_i,
                               mean_diff, stderr, passed)


def _vector_scan(lanes: XoshiroLanes, thr: np.uint64, window: int) -> np.ndarray:
    """Per lane: steps until the first marked slot, capped at window."""
    steps = np.full(lanes.lanes, window, dtype=np.int64)
    pending = np.ones(lanes.lanes, dtype=bool)
    for step in range(1, window + 1):
        hit = lanes.next_u64() < thr
        newly = pending & hit
        steps[newly] = step
        pending &= ~hit
        if not pending.any():
            break
    return steps


def _gap_from_slots(in_a, b, down, up, branch) -> np.ndarray:
    lo = np.where(in_a[0] | b[0], 0, np.where(in_a[-1] | b[-1], -1, -1 - down))
    hi = np.where(in_a[1] | b[1], 1, np.where(in_a[2] | b[2], 2, 2 + up))
    return np.where(branch, 1, hi - lo)


# ------------------------------------- finite-n asymptotic dominance probe

@dataclass
class AsymptoticProbeResult:
    n: int
    seed: int
    samples: int
    worst_shortfall: float
    cells: list  # (x, chain, count, shortfall)
    passed: bool


def asymptotic_dominance_probe(n: int, seed: int, samples: int = 4000,
                               xs=(0.3, 0.5, 0.7), tol: float = 0.02,
                               targets: int = 5) -> AsymptoticProbeResult:
    """Monte Carlo probe of the asymptotic domination of chain option
    counts by the extended gap law, on the rotation poset of one random
    instance.

    For sampled (downset, reveal order) pairs and each target m-chain, the
    option count X is computed structurally and bucketed by the fraction
    x of other w-chains revealed first, excluding the chain's own partner
    at the current top (whose early reveal is the gap-1 shortcut).  The
    probe requires Pr[X <= y] >= Pr[gap <= y] - tol - 3 sigma per bucket;
    tops at a chain boundary are skipped, mirroring the interior-only
    analysis.  This is a slack sanity probe, not an exact criterion.
    """
    from .instances import random_instance
    from .posets import enumerate_downset_masks
    from .rotations import build_rotation_poset, to_finite_poset

    profile = random_instance(n, seed)
    rposet = build_rotation_poset(profile)
    fp = to_finite_poset(rposet)
    from .posets import strict_below_masks
    below = strict_below_masks(fp)
    below_incl = [below[e] | (1 << e) for e in range(fp.size)]
    downsets = list(enumerate_downset_masks(fp))

    chains = list(rposet.m_chains) + list(rposet.w_chains)
    nch = 2 * n
    target_ids = sorted(range(n), key=lambda u: -len(chains[u]))[:targets]
    target_ids = [u for u in target_ids if len(chains[u]) >= 3]

    # partner w-chain of (m-chain u, rotation t): chain of u's next applicant in t
    partner_w: dict[tuple[int, int], int] = {}
    for t, rot in enumerate(rposet.rotations):
        k = len(rot.edges)
        for idx, (u, _) in enumerate(rot.edges):
            partner_w[(u, t)] = n + rot.edges[(idx + 1) % k][1]

    # per chain: prefix in-closures and suffix element masks per top index
    chain_prefix = []
    chain_suffix = []
    for ch in chains:
        pref = [0]
        for e in ch:
            pref.append(pref[-1] | below_incl[e])
        suf = [0] * (len(ch) + 1)
        for j in range(len(ch) - 1, -1, -1):
            suf[j] = suf[j + 1] | (1 << ch[j])
        chain_prefix.append(pref)
        chain_suffix.append(suf)

    def top_index(ci: int, mask: int) -> int:
        idx = 0
        for j, e in enumerate(chains[ci]):
            if mask >> e & 1:
                idx = j + 1
        return idx  # 0 = sentinel, j+1 = element j is the top

    rng = Xoshiro256StarStar(seed, stream=1)
    hists: dict[tuple[float, int], dict[int, int]] = {}
    for _ in range(samples):
        d_mask = downsets[rng.randrange(len(downsets))]
        order = rng.permutation(nch)
        pos_of = [0] * nch
        for pos, c in enumerate(order):
            pos_of[c] = pos
        for u in target_ids:
            ti = top_index(u, d_mask)
            if ti == 0 or ti >= len(chains[u]):
                continue  # boundary top, outside the interior analysis
            rot_top = chains[u][ti - 1]
            wpair = partner_w.get((u, rot_top))
            in_mask = 0
            out_els = 0
            l_count = 0
            my_pos = pos_of[u]
            for pos in range(my_pos):
                c = order[pos]
                cti = top_index(c, d_mask)
                in_mask |= chain_prefix[c][cti]
                out_els |= chain_suffix[c][cti]
                if c >= n and c != wpair:
                    l_count += 1
            x = l_count / n
            bucket = min(xs, key=lambda v: abs(v - x))
            if abs(bucket - x) > 0.05:
                continue
            options = 0
            for j in range(len(chains[u]) + 1):
                if (in_mask | chain_prefix[u][j]) & (out_els | chain_suffix[u][j]) == 0:
                    options += 1
            hist = hists.setdefault((bucket, u), {})
            hist[options] = hist.get(options, 0) + 1

    worst = 0.0
    cells = []
    for (x, u), hist in sorted(hists.items()):
        count = sum(hist.values())
        if count < 50:
            continue
        max_y = max(hist)
        acc = 0
        ref_acc = 0.0
        shortfall = 0.0
        for y in range(1, max_y + 1):
            acc += hist.get(y, 0)
            ref_acc += float(line_gap_pmf(x, y, EXTENDED))
            shortfall = max(shortfall, ref_acc - acc / count)
        cells.append((x, u, count, shortfall))
        worst = max(worst, shortfall)
    allowance = tol + 3.0 * math.sqrt(0.25 / max(
        min((c for _, _, c, _ in cells), default=samples), 1))
    return AsymptoticProbeResult(n, seed, samples, worst, cells,
                                 worst <= allowance)
