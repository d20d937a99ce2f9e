"""splitmix64: a tiny, fully specified 64-bit generator.

Used by every instance generator so that outputs are byte-identical across
platforms and Python versions.
"""

from __future__ import annotations

from typing import MutableSequence, Sequence, TypeVar

MASK = (1 << 64) - 1
T = TypeVar("T")


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection, no modulo bias."""
        if n < 1:
            raise ValueError("empty range")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def shuffle(self, items: MutableSequence[T]) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, population: Sequence[T], k: int) -> list[T]:
        """``k`` distinct items, in draw order (partial Fisher-Yates)."""
        pool = list(population)
        if k > len(pool):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
