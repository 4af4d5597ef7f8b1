"""Upper bounds on tuple-family sizes by revealing components one by one.

A family S of n-tuples is bounded through the option counts X_i(s, pi):
the number of values component i can still take once the components
before it (under a reveal order pi) are pinned to those of s.  Averaging
log X_i over random members and/or random orders bounds log |S|; taking
the plain expectation instead of the log gives a weaker product bound.
Adapters cover the worked three-component family, perfect matchings of a
bipartite graph (degree-factorial bound), and downsets of a tangled grid
encoded by their per-chain top elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial

from .posets import TangledGrid, enumerate_downset_masks
from .rng import Xoshiro256StarStar

EXACT_COMPONENT_LIMIT = 8

VARIANTS = ("fixed_order", "averaged", "worst_member", "mean_product")


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class TupleFamily:
    """Explicit family of n-tuples with the component value sets."""

    components: tuple[tuple, ...]
    members: tuple[tuple, ...]

    def __post_init__(self):
        comp_sets = [set(c) for c in self.components]
        if any(len(cs) != len(c) for cs, c in zip(comp_sets, self.components)):
            raise FamilyError("component value sets contain repeats")
        if len(set(self.members)) != len(self.members):
            raise FamilyError("members are not distinct")
        for m in self.members:
            if len(m) != len(self.components):
                raise FamilyError(f"member {m} has wrong arity")
            for i, x in enumerate(m):
                if x not in comp_sets[i]:
                    raise FamilyError(f"member entry {x!r} outside component {i}")

    @property
    def n(self) -> int:
        return len(self.components)


def option_count(family: TupleFamily, member: tuple, order: tuple[int, ...], i: int) -> int:
    """Number of possible i-th components among members agreeing with
    ``member`` on every component revealed before i under ``order``."""
    if member not in family.members:
        raise FamilyError(f"{member} is not a family member")
    if sorted(order) != list(range(family.n)):
        raise FamilyError("order must be a permutation of the component indices")
    prefix = order[: order.index(i)]
    vals = {m[i] for m in family.members
            if all(m[j] == member[j] for j in prefix)}
    return len(vals)


def _counts_for_prefix(family: TupleFamily, i: int, prefix: tuple[int, ...]) -> list[int]:
    """X_i(s, prefix) for every member at once, by grouping on the prefix."""
    groups: dict[tuple, set] = {}
    for m in family.members:
        groups.setdefault(tuple(m[j] for j in prefix), set()).add(m[i])
    return [len(groups[tuple(m[j] for j in prefix)]) for m in family.members]


def _uniform_prefix_mixes(family: TupleFamily, i: int) -> list[dict[int, Fraction]]:
    """Distribution of X_i(s, pi) over a uniform order, per member.

    X_i depends only on the *set* revealed before i, whose law under a
    uniform order weights a prefix set T by |T|! (n-1-|T|)! / n!.
    """
    n = family.n
    others = [j for j in range(n) if j != i]
    weights = [Fraction(factorial(m) * factorial(n - 1 - m), factorial(n))
               for m in range(n)]
    mixes: list[dict[int, Fraction]] = [{} for _ in family.members]
    for size in range(n):
        w = weights[size]
        for T in combinations(others, size):
            for mi, c in enumerate(_counts_for_prefix(family, i, T)):
                mixes[mi][c] = mixes[mi].get(c, 0) + w
    return mixes


def _mix_log(mix: dict[int, Fraction]) -> float:
    return math.fsum(float(p) * math.log(c) for c, p in sorted(mix.items()))


def _mix_mean(mix: dict[int, Fraction]) -> Fraction:
    return sum((p * c for c, p in mix.items()), Fraction(0))


@dataclass(frozen=True)
class BoundMode:
    """How to aggregate the option counts.

    variant: 'fixed_order' (expected log over members, one fixed order),
    'averaged' (expected log over members and orders), 'worst_member'
    (per component, worst member's expected log), 'mean_product'
    (per component, worst member's expected count; product bound).
    orders: 'uniform', a single order tuple, or a tuple of (order, weight)
    pairs with weights summing to 1.
    samples: 0 for exact evaluation (uniform orders need n <= 8),
    otherwise the Monte Carlo sample count.
    """

    variant: str
    orders: object = "uniform"
    samples: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise FamilyError(f"unknown variant {self.variant!r}")
        if self.orders != "uniform" and _single_order(self.orders) is None:
            total = sum(Fraction(w) for _, w in self.orders)
            if total != 1:
                raise FamilyError("order weights must sum to 1")


@dataclass
class BoundResult:
    """Log-domain bound on |S| with per-component statistics."""

    variant: str
    value: float
    per_component: tuple
    exact: bool
    log_mix: dict[int, Fraction] | None = None  # exact weights of log arguments
    product: Fraction | None = None             # exact product, mean_product only
    stderr: float | None = None
    samples: int | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        out = {
            "variant": self.variant,
            "value": self.value,
            "per_component": [float(x) for x in self.per_component],
            "exact": self.exact,
        }
        if self.product is not None:
            out["product"] = f"{self.product.numerator}/{self.product.denominator}"
        if self.stderr is not None:
            out["stderr"] = self.stderr
            out["samples"] = self.samples
            out["seed"] = self.seed
        return out


def _single_order(orders) -> tuple[int, ...] | None:
    if isinstance(orders, tuple) and orders and isinstance(orders[0], int):
        return orders
    return None


def _member_mixes(family: TupleFamily, i: int, orders) -> list[dict[int, Fraction]]:
    single = _single_order(orders)
    if single is not None:
        prefix = single[: single.index(i)]
        return [{c: Fraction(1)} for c in _counts_for_prefix(family, i, prefix)]
    if orders == "uniform":
        return _uniform_prefix_mixes(family, i)
    mixes: list[dict[int, Fraction]] = [{} for _ in family.members]
    for order, w in orders:
        w = Fraction(w)
        prefix_of = {i2: order[: order.index(i2)] for i2 in range(family.n)}
        for mi, c in enumerate(_counts_for_prefix(family, i, prefix_of[i])):
            mixes[mi][c] = mixes[mi].get(c, 0) + w
    return mixes


def _merge_mix(target: dict[int, Fraction], mix: dict[int, Fraction], scale: Fraction) -> None:
    for c, p in mix.items():
        target[c] = target.get(c, 0) + p * scale


def reveal_bound(family: TupleFamily, mode: BoundMode, seed: int = 0) -> BoundResult:
    """Bound log |S| per the chosen mode; exact where feasible, else seeded
    Monte Carlo over reveal orders with a reported standard error."""
    if not family.members:
        raise FamilyError("family is empty")
    n = family.n
    if mode.variant == "fixed_order" and _single_order(mode.orders) is None:
        raise FamilyError("fixed_order requires a single order")
    exact_ok = (mode.orders != "uniform") or n <= EXACT_COMPONENT_LIMIT
    if mode.samples == 0 and not exact_ok:
        raise FamilyError(
            f"exact uniform-order expectation supports up to {EXACT_COMPONENT_LIMIT}"
            " components; set samples for Monte Carlo")
    if mode.samples > 0:
        if mode.orders != "uniform":
            raise FamilyError("Monte Carlo sampling applies to uniform orders only")
        return _reveal_bound_mc(family, mode, seed)

    size_frac = Fraction(1, len(family.members))
    per_component = []
    log_mix: dict[int, Fraction] = {}
    product = Fraction(1) if mode.variant == "mean_product" else None
    for i in range(n):
        mixes = _member_mixes(family, i, mode.orders)
        if mode.variant in ("fixed_order", "averaged"):
            comp_mix: dict[int, Fraction] = {}
            for mix in mixes:
                _merge_mix(comp_mix, mix, size_frac)
            per_component.append(_mix_log(comp_mix))
            _merge_mix(log_mix, comp_mix, Fraction(1))
        elif mode.variant == "worst_member":
            logs = [_mix_log(mix) for mix in mixes]
            best = max(range(len(mixes)), key=lambda mi: (logs[mi], mi))
            per_component.append(logs[best])
            _merge_mix(log_mix, mixes[best], Fraction(1))
        else:  # mean_product
            means = [_mix_mean(mix) for mix in mixes]
            best = max(means)
            per_component.append(best)
            product *= best
    if mode.variant == "mean_product":
        value = math.fsum(math.log(x) for x in per_component)
        return BoundResult(mode.variant, value, tuple(per_component), True,
                           product=product)
    value = math.fsum(per_component)
    return BoundResult(mode.variant, value, tuple(per_component), True,
                       log_mix=log_mix)


def reveal_bounds_exact(family: TupleFamily) -> dict[str, BoundResult]:
    """All exact uniform-order variants at once, sharing the per-component
    option-count mixtures (they dominate the cost)."""
    if not family.members:
        raise FamilyError("family is empty")
    n = family.n
    if n > EXACT_COMPONENT_LIMIT:
        raise FamilyError(f"needs at most {EXACT_COMPONENT_LIMIT} components")
    size_frac = Fraction(1, len(family.members))
    avg_pc, avg_mix = [], {}
    worst_pc, worst_mix = [], {}
    prod_pc = []
    product = Fraction(1)
    for i in range(n):
        mixes = _uniform_prefix_mixes(family, i)
        comp_mix: dict[int, Fraction] = {}
        for mix in mixes:
            _merge_mix(comp_mix, mix, size_frac)
        avg_pc.append(_mix_log(comp_mix))
        _merge_mix(avg_mix, comp_mix, Fraction(1))
        logs = [_mix_log(mix) for mix in mixes]
        best = max(range(len(mixes)), key=lambda mi: (logs[mi], mi))
        worst_pc.append(logs[best])
        _merge_mix(worst_mix, mixes[best], Fraction(1))
        best_mean = max(_mix_mean(mix) for mix in mixes)
        prod_pc.append(best_mean)
        product *= best_mean
    return {
        "averaged": BoundResult("averaged", math.fsum(avg_pc), tuple(avg_pc),
                                True, log_mix=avg_mix),
        "worst_member": BoundResult("worst_member", math.fsum(worst_pc),
                                    tuple(worst_pc), True, log_mix=worst_mix),
        "mean_product": BoundResult(
            "mean_product", math.fsum(math.log(x) for x in prod_pc),
            tuple(prod_pc), True, product=product),
    }


def _reveal_bound_mc(family: TupleFamily, mode: BoundMode, seed: int) -> BoundResult:
    n = family.n
    rng = Xoshiro256StarStar(seed)
    nm = len(family.members)
    sums = [[0.0] * nm for _ in range(n)]
    sqs = [[0.0] * nm for _ in range(n)]
    lin_sums = [[0.0] * nm for _ in range(n)]
    lin_sqs = [[0.0] * nm for _ in range(n)]
    for _ in range(mode.samples):
        order = tuple(rng.permutation(n))
        for i in range(n):
            prefix = order[: order.index(i)]
            for mi, c in enumerate(_counts_for_prefix(family, i, prefix)):
                v = math.log(c)
                sums[i][mi] += v
                sqs[i][mi] += v * v
                lin_sums[i][mi] += c
                lin_sqs[i][mi] += c * c
    t = mode.samples

    def mean_stderr(sm, sq):
        mean = sm / t
        var = max(sq / t - mean * mean, 0.0)
        return mean, math.sqrt(var / t)

    per_component = []
    errs = []
    if mode.variant in ("fixed_order", "averaged"):
        for i in range(n):
            mean, err = mean_stderr(math.fsum(sums[i]) / nm, math.fsum(sqs[i]) / nm)
            per_component.append(mean)
            errs.append(err)
    elif mode.variant == "worst_member":
        for i in range(n):
            stats = [mean_stderr(sums[i][mi], sqs[i][mi]) for mi in range(nm)]
            mean, err = max(stats, key=lambda p: p[0])
            per_component.append(mean)
            errs.append(err)
    else:
        for i in range(n):
            stats = [mean_stderr(lin_sums[i][mi], lin_sqs[i][mi]) for mi in range(nm)]
            mean, err = max(stats, key=lambda p: p[0])
            per_component.append(mean)
            errs.append(err / mean)  # delta method for log
    if mode.variant == "mean_product":
        value = math.fsum(math.log(x) for x in per_component)
    else:
        value = math.fsum(per_component)
    stderr = math.sqrt(math.fsum(e * e for e in errs))
    return BoundResult(mode.variant, value, tuple(per_component), False,
                       stderr=stderr, samples=mode.samples, seed=seed)


def bound_holds(result: BoundResult, family: TupleFamily, tol: float = 1e-9) -> bool:
    """log |S| <= bound: exact modes within tol (high-precision fallback for
    hairline margins), Monte Carlo modes within 4 standard errors."""
    target = math.log(len(family.members))
    if not result.exact:
        return result.value >= target - 4.0 * result.stderr
    if result.value - target >= tol:
        return True
    if result.product is not None:  # product bound compares exactly as rationals
        return result.product >= len(family.members)
    import mpmath as mp

    with mp.workdps(60):
        hp = mp.fsum(mp.mpf(p.numerator) / p.denominator * mp.log(c)
                     for c, p in sorted(result.log_mix.items()))
        return hp >= mp.log(len(family.members)) - mp.mpf("1e-30")


def diagonal_pair_family(limit: int) -> TupleFamily:
    """Three-component family over {0..limit}^3 whose members have two
    equal positive coordinates and one zero: 3*limit members."""
    if limit < 1:
        raise FamilyError("limit must be >= 1")
    members = []
    for i in range(1, limit + 1):
        members.append((i, i, 0))
    for i in range(1, limit + 1):
        members.append((i, 0, i))
    for i in range(1, limit + 1):
        members.append((0, i, i))
    comp = tuple(range(limit + 1))
    return TupleFamily((comp, comp, comp), tuple(members))


@dataclass(frozen=True)
class BipartiteGraph:
    left_size: int
    right_size: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < self.left_size and 0 <= v < self.right_size):
                raise FamilyError(f"edge ({u},{v}) out of range")

    def right_degrees(self) -> list[int]:
        deg = [0] * self.right_size
        for _, v in self.edges:
            deg[v] += 1
        return deg


def random_bipartite_graph(left: int, right: int, edge_prob_u64: int,
                           rng: Xoshiro256StarStar) -> BipartiteGraph:
    edges = {(u, v) for u in range(left) for v in range(right)
             if rng.bernoulli(edge_prob_u64)}
    return BipartiteGraph(left, right, frozenset(edges))


def perfect_matchings(graph: BipartiteGraph) -> list[tuple[tuple[int, int], ...]]:
    """All perfect matchings as tuples of edges indexed by right vertex."""
    if graph.left_size != graph.right_size:
        raise FamilyError("perfect matchings need equal side sizes")
    n = graph.right_size
    nbrs = [sorted(u for u, v in graph.edges if v == r) for r in range(n)]
    out = []
    pick: list[tuple[int, int]] = []

    def rec(r: int, used: int) -> None:
        if r == n:
            out.append(tuple(pick))
            return
        for u in nbrs[r]:
            if not used >> u & 1:
                pick.append((u, r))
                rec(r + 1, used | (1 << u))
                pick.pop()

    rec(0, 0)
    return out


def count_perfect_matchings(graph: BipartiteGraph) -> int:
    return len(perfect_matchings(graph))


def perfect_matching_family(graph: BipartiteGraph) -> TupleFamily:
    """Components are the edge sets at each right vertex; members are the
    perfect matchings."""
    pms = perfect_matchings(graph)
    if not pms:
        raise FamilyError("graph has no perfect matching")
    comps = tuple(tuple(sorted((u, r) for u, v in graph.edges if v == r))
                  for r in range(graph.right_size))
    return TupleFamily(comps, tuple(pms))


def bregman_log_bound(graph: BipartiteGraph) -> float:
    """log of prod_i (d_i!)^(1/d_i) over right-vertex degrees; isolated
    vertices contribute nothing (they force zero matchings anyway)."""
    total = 0.0
    for d in graph.right_degrees():
        if d > 0:
            total += math.lgamma(d + 1) / d
    return total


def downset_top_family(grid: TangledGrid) -> TupleFamily:
    """Encode every downset of the grid by its top element per chain.

    Components are the 2n chains, each padded below with a sentinel (-1)
    so that an untouched chain still has a well-defined top; a downset's
    code is the tuple of per-chain tops, which determines it uniquely.
    """
    chains = list(grid.m_chains) + list(grid.w_chains)
    comps = tuple((-1,) + tuple(ch) for ch in chains)
    members = []
    for mask in enumerate_downset_masks(grid.poset):
        code = []
        for ch in chains:
            top = -1
            for e in ch:
                if mask >> e & 1:
                    top = e
            code.append(top)
        members.append(tuple(code))
    if len(set(members)) != len(members):
        raise FamilyError("downset codes collide; grid structure broken")
    return TupleFamily(comps, tuple(members))
