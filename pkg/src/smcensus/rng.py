"""Deterministic pseudo-random generation for the whole toolkit.

Every random draw in the package flows through xoshiro256** seeded via
SplitMix64, so identical seeds give bit-identical streams on every
platform.  A numpy-vectorized multi-lane variant backs the heavy Monte
Carlo checks; lane j of the vector generator carries exactly the same
state as the scalar generator opened with ``stream=j``.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int):
    """Yield the SplitMix64 output sequence starting from ``state``."""
    x = state & _MASK64
    while True:
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def _stream_state(seed: int, stream: int) -> list[int]:
    """Four xoshiro state words for (seed, stream): SplitMix64 outputs 4*stream..4*stream+3."""
    gen = _splitmix64(seed)
    out = []
    for _ in range(4 * stream):
        next(gen)
    for _ in range(4):
        out.append(next(gen))
    if all(w == 0 for w in out):  # all-zero state is a fixed point of xoshiro
        out[0] = 0x9E3779B97F4A7C15
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """Scalar xoshiro256** stream.

    ``seed`` is any 64-bit integer; ``stream`` selects an independent
    substream (used for worker/seed splitting).
    """

    def __init__(self, seed: int, stream: int = 0):
        self._s = _stream_state(seed & _MASK64, stream)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n) by bitmask rejection."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        k = (n - 1).bit_length()
        if k == 0:
            return 0
        while True:
            r = self.next_u64() >> (64 - k)
            if r < n:
                return r

    def shuffle(self, xs: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(xs) - 1, 0, -1):
            j = self.randrange(i + 1)
            xs[i], xs[j] = xs[j], xs[i]

    def permutation(self, n: int) -> list[int]:
        xs = list(range(n))
        self.shuffle(xs)
        return xs

    def sample_range(self, m: int, k: int) -> list[int]:
        """k distinct values from range(m), via partial Fisher-Yates; order discarded."""
        if not 0 <= k <= m:
            raise ValueError("need 0 <= k <= m")
        xs = list(range(m))
        for i in range(k):
            j = i + self.randrange(m - i)
            xs[i], xs[j] = xs[j], xs[i]
        return sorted(xs[:k])

    def bernoulli(self, threshold: int) -> bool:
        """True with probability threshold / 2^64 (integer threshold, exact)."""
        return self.next_u64() < threshold


def bernoulli_threshold(p) -> int:
    """Integer t with t/2^64 closest below-or-equal to probability p."""
    from fractions import Fraction

    f = Fraction(p) if not isinstance(p, float) else Fraction(p)
    if not 0 <= f <= 1:
        raise ValueError("probability outside [0, 1]")
    return int(f * (1 << 64))


class XoshiroLanes:
    """Vectorized xoshiro256**: ``lanes`` independent substreams advanced in lockstep.

    Lane j reproduces Xoshiro256StarStar(seed, stream=j) bit for bit, so the
    vectorized Monte Carlo paths are deterministic and cross-checkable
    against the scalar generator.
    """

    def __init__(self, seed: int, lanes: int):
        gen = _splitmix64(seed & _MASK64)
        words = [next(gen) for _ in range(4 * lanes)]
        state = np.array(words, dtype=np.uint64).reshape(lanes, 4)
        zero_rows = ~state.any(axis=1)
        state[zero_rows, 0] = np.uint64(0x9E3779B97F4A7C15)
        self._s = [state[:, i].copy() for i in range(4)]
        self.lanes = lanes

    def next_u64(self) -> np.ndarray:
        s0, s1, s2, s3 = self._s
        result = np.left_shift(s1, np.uint64(2)) + s1  # s1 * 5 mod 2^64
        result = (np.left_shift(result, np.uint64(7))
                  | np.right_shift(result, np.uint64(57)))
        result = np.left_shift(result, np.uint64(3)) + result  # * 9
        t = np.left_shift(s1, np.uint64(17))
        s2 = s2 ^ s0
        s3 = s3 ^ s1
        s1 = s1 ^ s2
        s0 = s0 ^ s3
        s2 = s2 ^ t
        s3 = (np.left_shift(s3, np.uint64(45))
              | np.right_shift(s3, np.uint64(19)))
        self._s = [s0, s1, s2, s3]
        return result

    def bernoulli(self, threshold: int) -> np.ndarray:
        """Boolean vector, each lane True with probability threshold / 2^64."""
        return self.next_u64() < np.uint64(threshold & _MASK64)
