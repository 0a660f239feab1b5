"""Deterministic, platform-independent PRNG (SplitMix64).

Random update orders and seeded random states must reproduce bit-for-bit
across platforms, so the platform RNG is never used.  SplitMix64 is the
64-bit generator of Steele, Lea & Flood with the increment 0x9E3779B97F4A7C15
and finalizer constants 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


class SplitMix64:
    """64-bit SplitMix64 stream seeded with an arbitrary integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def next_below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) via rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK - (_MASK + 1) % bound
        while True:
            r = self.next_u64()
            if r <= limit:
                return r % bound

    def next_unit(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def permutation(n: int, seed: int) -> np.ndarray:
    """Fisher-Yates shuffle of 0..n-1 driven by SplitMix64."""
    rng = SplitMix64(seed)
    perm = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = rng.next_below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def uniform_array(n: int, seed: int, low: float, high: float) -> np.ndarray:
    """n deterministic uniforms in [low, high)."""
    rng = SplitMix64(seed)
    out = np.empty(n)
    span = high - low
    for i in range(n):
        out[i] = low + span * rng.next_unit()
    return out
