"""Seedable SplitMix64 generator with hash-derived sub-streams.

Everything random in the package draws through :class:`Rng`, so a run is a
pure function of its seed. ``Rng.stream(seed, *keys)`` gives independent
generators for named sub-tasks (e.g. one per parallel sub-round and event)
without consuming state from a parent generator.
"""

from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class Rng:
    """SplitMix64. Not cryptographic; 64-bit state, period 2**64."""

    __slots__ = ("seed", "state")

    def __init__(self, seed: int = 0):
        self.seed = seed & MASK64
        self.state = self.seed

    @classmethod
    def stream(cls, seed: int, *keys) -> "Rng":
        """Generator for the sub-stream named by ``keys`` under master ``seed``."""
        h = hashlib.blake2b(repr((seed & MASK64,) + keys).encode(), digest_size=8)
        return cls(int.from_bytes(h.digest(), "little"))

    def split(self, *keys) -> "Rng":
        return Rng.stream(self.seed, *keys)

    def next64(self) -> int:
        s = (self.state + _GAMMA) & MASK64
        self.state = s
        z = ((s ^ (s >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, k: int) -> int:
        """Uniform integer in ``[0, k)`` (Lemire's method, exact)."""
        if k <= 0:
            raise ValueError("below() needs k >= 1")
        m = self.next64() * k
        low = m & MASK64
        if low < k:
            threshold = (MASK64 + 1 - k) % k
            while low < threshold:
                m = self.next64() * k
                low = m & MASK64
        return m >> 64

    def random(self) -> float:
        return (self.next64() >> 11) * (1.0 / (1 << 53))

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items, r: int) -> list:
        """``r`` distinct elements of ``items`` in random order."""
        pool = list(items)
        n = len(pool)
        if r > n:
            raise ValueError("sample larger than population")
        for i in range(r):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:r]

    def choice(self, items):
        return items[self.below(len(items))]
