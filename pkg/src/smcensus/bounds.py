"""Exact identities and series constants behind the counting bounds.

Everything rational is computed exactly; series values come back as
enclosures [lo, hi] built from a float partial sum (with an explicit
rounding pad) plus a rigorous integral tail majorant.  The per-chain
log-bound constants asserted downstream are 1.2038 for the plain gap
variant and 0.6331 for the extended one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath as mp
import numpy as np

from .distributions import EXTENDED, PLAIN, DistributionError

PLAIN_LOG_LIMIT = 1.2038
EXTENDED_LOG_LIMIT = 0.6331

_SUM_PAD = 1e-10  # covers term evaluation and pairwise-summation rounding
_BLOCK = 10 ** 6


def whitworth(m: int, a: int, n: int) -> tuple[Fraction, Fraction, bool]:
    """Both sides of the binomial-ratio summation identity
    sum_j C(m,j)/C(n,j+a) = (n+1) / ((a+1) C(n-m+1, a+1)), exactly."""
    if m < 0 or a < 0 or n < m + a:
        raise ValueError("need m >= 0, a >= 0, n >= m + a")
    lhs = sum(Fraction(comb(m, j), comb(n, j + a)) for j in range(m + 1))
    rhs = Fraction(n + 1, (a + 1) * comb(n - m + 1, a + 1))
    return lhs, rhs, lhs == rhs


def whitworth_sweep(n_max: int) -> int:
    """Assert the identity for every (m, a, n) with n <= n_max; returns the
    number of triples checked."""
    checked = 0
    for n in range(0, n_max + 1):
        for m in range(0, n + 1):
            for a in range(0, n - m + 1):
                lhs, rhs, ok = whitworth(m, a, n)
                if not ok:
                    raise AssertionError(f"identity fails at m={m}, a={a}, n={n}")
                checked += 1
    return checked


# ------------------------------------------------------------ finite-n bound

def finite_reveal_log_bound(n: int) -> float:
    """Exact finite-n ceiling on the expected log option count per chain:
    2 log(n+1)/(n+1) + 2 (n+2)/(n+1) * sum_{k=2..n} log k / ((k+1)(k+2))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = math.fsum(math.log(k) / ((k + 1) * (k + 2)) for k in range(2, n + 1))
    return 2 * math.log(n + 1) / (n + 1) + 2 * (n + 2) / (n + 1) * s


@dataclass(frozen=True)
class ScanResult:
    max_value: float
    argmax: int
    certified_hi: float  # max_value plus a rounding-drift allowance


def finite_reveal_log_bound_scan(limit: int) -> ScanResult:
    """Maximum of finite_reveal_log_bound over 1..limit, vectorized.

    The cumulative sum is cross-checked against an exactly rounded full
    sum so the certified bound absorbs any accumulation drift.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    best_v, best_n = 2 * math.log(2) / 2, 1
    drift = 0.0
    prev_tail = 0.0
    for lo in range(2, limit + 1, _BLOCK):
        hi = min(lo + _BLOCK - 1, limit)
        k = np.arange(lo, hi + 1, dtype=np.float64)
        terms = np.log(k) / ((k + 1.0) * (k + 2.0))
        cs = prev_tail + np.cumsum(terms)
        f = 2.0 * np.log(k + 1.0) / (k + 1.0) + 2.0 * (k + 2.0) / (k + 1.0) * cs
        i = int(np.argmax(f))
        if float(f[i]) > best_v:
            best_v, best_n = float(f[i]), int(k[i])
        drift += abs(float(cs[-1] - prev_tail) - math.fsum(terms.tolist()))
        prev_tail = float(cs[-1])
    certified = best_v + 2.0 * (drift + _SUM_PAD)
    return ScanResult(best_v, best_n, certified)


# ------------------------------------------------------------- series values

@dataclass(frozen=True)
class Interval:
    """Enclosure of a series value: partial sum minus/plus pads, with the
    tail majorant folded into hi."""

    lo: float
    hi: float
    truncation: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval with lo > hi")


def _series_terms(variant: str, k: np.ndarray) -> np.ndarray:
    if variant == PLAIN:
        return 2.0 * np.log(k) / ((k + 1.0) * (k + 2.0))
    return np.log(k) * (2.0 * k * (k + 7.0) + 72.0) / (
        (k + 3.0) * (k + 5.0) * (k + 6.0) * (k + 7.0))


def _series_head(variant: str) -> tuple[int, float]:
    """First summed k and the closed head terms preceding it."""
    if variant == PLAIN:
        return 2, 0.0
    return 4, math.log(2) / 12 + math.log(3) * 23 / 630


def _tail_majorant(variant: str, K: int) -> float:
    """Integral bound on the tail: terms are at most c log k / k^2 (c = 2
    plain, 4 extended; see verify_term_majorants), and that function is
    decreasing past e, so the tail is at most its integral from K."""
    c = 2.0 if variant == PLAIN else 4.0
    return c * (math.log(K) + 1.0) / K


def gap_log_series(K: int, variant: str = PLAIN) -> Interval:
    """Enclosure of the gap-law log series truncated at K.

    plain: sum_{k>=2} 2 log k / ((k+1)(k+2));
    extended: log(2)/12 + log(3) 23/630
              + sum_{k>=4} log k (2k(k+7)+72)/((k+3)(k+5)(k+6)(k+7)).
    """
    min_k = 10 if variant == PLAIN else 8
    if K < min_k:
        raise ValueError(f"K must be >= {min_k}")
    start, partial = _series_head(variant)
    for lo in range(start, K + 1, _BLOCK):
        hi = min(lo + _BLOCK - 1, K)
        k = np.arange(lo, hi + 1, dtype=np.float64)
        partial += float(np.sum(_series_terms(variant, k)))
    return Interval(partial - _SUM_PAD,
                    partial + _tail_majorant(variant, K) + _SUM_PAD, K)


def verify_term_majorants(variant: str, k_exact: int = 10 ** 5) -> bool:
    """Prove term_k <= c log k / k^2 for every k, exactly.

    The inequality divides by log k and cross-multiplies into P(k) >= 0
    for an integer polynomial P; P is reconstructed by exact interpolation
    and all its coefficients come out nonnegative, which settles every k
    at once (leading coefficient 2 k^4 for the extended variant, 3 k + 2
    for the plain one).  Explicit integer comparisons re-check k <= k_exact.
    """
    if variant == PLAIN:
        # (k+1)(k+2) >= k^2  <=>  3k + 2 >= 0
        diff = [2, 3]
    elif variant == EXTENDED:
        # 4 (k+3)(k+5)(k+6)(k+7) - k^2 (2k^2 + 14k + 72) >= 0
        diff = _interpolate_int_poly(
            lambda k: 4 * (k + 3) * (k + 5) * (k + 6) * (k + 7)
            - k * k * (2 * k * k + 14 * k + 72), degree=4)
    else:
        raise DistributionError(f"unknown variant {variant!r}")
    if any(c < 0 for c in diff):
        return False
    for k in range(1, k_exact + 1):
        if variant == PLAIN:
            if k * k > (k + 1) * (k + 2):
                return False
        else:
            if k * k * (2 * k * k + 14 * k + 72) > 4 * (k + 3) * (k + 5) * (k + 6) * (k + 7):
                return False
    return True


def _interpolate_int_poly(f, degree: int) -> list[int]:
    """Exact coefficients of an integer polynomial from degree+1 samples."""
    xs = list(range(degree + 1))
    ys = [Fraction(f(x)) for x in xs]
    coeffs = [Fraction(0)] * (degree + 1)
    for i, xi in enumerate(xs):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = _poly_mul_frac(basis, [Fraction(-xj), Fraction(1)])
            denom *= xi - xj
        scale = ys[i] / denom
        for d, c in enumerate(basis):
            coeffs[d] += scale * c
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise AssertionError("interpolation did not yield integers")
        out.append(c.numerator)
    return out


def _poly_mul_frac(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# ----------------------------------------------------------- pmf integrals

def _poly_mul_int(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_int_01(coeffs: list[int]) -> Fraction:
    return sum((Fraction(c, j + 1) for j, c in enumerate(coeffs)), Fraction(0))


_Q = [1, -1]            # 1 - x
_C = [0, 2, -1]         # 1 - (1-x)^2
_X = [0, 1]


def line_gap_pmf_poly(k: int, variant: str) -> list[int]:
    """Integer coefficients of the gap pmf as a polynomial in x."""
    if variant == PLAIN:
        if k < 1:
            raise ValueError("k must be >= 1 for the plain variant")
        qpow = [1]
        for _ in range(k - 1):
            qpow = _poly_mul_int(qpow, _Q)
        return _poly_mul_int([0, 0, k], qpow)
    if variant != EXTENDED:
        raise DistributionError(f"unknown variant {variant!r}")
    if k < 2:
        raise ValueError("k must be >= 2 for the extended variant")
    qpow = {0: [1]}
    for i in range(1, k + 5):
        qpow[i] = _poly_mul_int(qpow[i - 1], _Q)
    if k == 2:
        return _poly_mul_int([2], _poly_mul_int(qpow[3], _poly_mul_int(_C, _C)))
    if k == 3:
        a = _poly_mul_int(qpow[5], _poly_mul_int(_C, _C))
        b = _poly_mul_int([2], _poly_mul_int(qpow[5], _poly_mul_int(_C, _X)))
        return _poly_add(a, b)
    a = _poly_mul_int([2], _poly_mul_int(qpow[k + 2], _poly_mul_int(_C, _X)))
    b = _poly_mul_int([2], _poly_mul_int(qpow[k + 3], _poly_mul_int(_C, _X)))
    c = _poly_mul_int([k - 4], _poly_mul_int(qpow[k + 4], _poly_mul_int(_X, _X)))
    return _poly_add(_poly_add(a, b), c)


def _poly_add(a: list[int], b: list[int]) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return out


def series_coefficient(k: int, variant: str) -> Fraction:
    """The closed-form value of the pmf integral over x in [0, 1]."""
    if variant == PLAIN:
        return Fraction(2, (k + 1) * (k + 2))
    if k == 2:
        return Fraction(1, 12)
    if k == 3:
        return Fraction(23, 630)
    return Fraction(2 * k * (k + 7) + 72,
                    (k + 3) * (k + 5) * (k + 6) * (k + 7))


def integral_check(k: int, variant: str = PLAIN) -> tuple[Fraction, Fraction, bool]:
    """Integrate the pmf polynomial exactly and compare with the closed form."""
    integral = _poly_int_01(line_gap_pmf_poly(k, variant))
    closed = series_coefficient(k, variant)
    return integral, closed, integral == closed


# --------------------------------------------------------------- the report

def bound_report(n: int, digits: int = 12) -> dict:
    """Per-n values of the exponential bounds at 50-digit working precision,
    plus the one-time base comparisons."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with mp.workdps(50):
        values = {
            "exp(2.4076 n)": mp.exp(mp.mpf("2.4076") * n),
            "11.11^n": mp.mpf("11.11") ** n,
            "exp(1.2662 n)": mp.exp(mp.mpf("1.2662") * n),
            "exp(1.2663 n)": mp.exp(mp.mpf("1.2663") * n),
            "3.55^n": mp.mpf("3.55") ** n,
        }
        checks = {
            "exp(2.4076) <= 11.11": mp.exp(mp.mpf("2.4076")) <= mp.mpf("11.11"),
            "exp(1.2662) <= 3.55": mp.exp(mp.mpf("1.2662")) <= mp.mpf("3.55"),
            "exp(1.2663) <= 3.55": mp.exp(mp.mpf("1.2663")) <= mp.mpf("3.55"),
        }
        return {
            "n": n,
            "values": {k: mp.nstr(v, digits) for k, v in values.items()},
            "checks": checks,
        }
