"""Seeded 64-bit shift-register generator used for every random draw.

The generator is xorshift64* (Marsaglia shifts 12/25/27, output multiplier
0x2545F4914F6CDD1D).  The 64-bit state is initialised from the user seed by
one round of splitmix64, so seed 0 is valid.  The exact recurrence is::

    state ^= state >> 12
    state ^= (state << 25) mod 2**64
    state ^= state >> 27
    output = (state * 0x2545F4914F6CDD1D) mod 2**64

Everything downstream (random points, translation samples, rotation angles)
is derived from ``next_u64`` so the bit stream is identical on every
platform and Python version.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    """xorshift64* generator with splitmix64 seeding."""

    def __init__(self, seed: int = 0):
        if not isinstance(seed, int):
            raise TypeError("seed must be an integer")
        self.seed = seed & MASK64
        state = splitmix64(self.seed)
        self._state = state if state else 0x9E3779B97F4A7C15

    @property
    def state(self) -> int:
        return self._state

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self._state = x
        return (x * _MULT) & MASK64

    def random_bits(self, k: int) -> int:
        """Return a k-bit integer built from consecutive outputs, MSB first."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        out = 0
        filled = 0
        while filled < k:
            take = min(64, k - filled)
            out = (out << take) | (self.next_u64() >> (64 - take))
            filled += take
        return out

    def bitstring(self, k: int) -> str:
        return format(self.random_bits(k), "b").zfill(k) if k else ""

    def uniform(self) -> float:
        """Float in [0, 1) from the top 53 bits of one output."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        bits = max(1, (n - 1).bit_length())
        while True:
            v = self.random_bits(bits)
            if v < n:
                return v

    def integer_in(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.below(hi - lo + 1)

    def normal(self) -> float:
        # Box-Muller; 1 - u keeps the log argument in (0, 1].
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def fork(self) -> "XorShift64Star":
        """Independent child stream seeded from the next output."""
        return XorShift64Star(self.next_u64())
