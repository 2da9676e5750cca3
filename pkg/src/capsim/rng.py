"""Minimal-standard Lehmer generator (multiplier 16807, modulus 2**31 - 1).

Matches the classic minstd_rand0 semantics so seeded scenario generation is
reproducible across platforms and processes: states are the integers in
[1, 2**31 - 2] and a seed congruent to 0 is replaced by 1.
"""

from __future__ import annotations

from typing import List, Sequence, TypeVar

T = TypeVar("T")

MODULUS = 2_147_483_647  # 2**31 - 1, prime
MULTIPLIER = 16_807


class MinStd:
    """Deterministic stream of pseudo-random integers."""

    def __init__(self, seed: int) -> None:
        if seed < 0:
            raise ValueError("seed must be nonnegative")
        self.state = seed % MODULUS
        if self.state == 0:
            self.state = 1

    def next_raw(self) -> int:
        """Next raw draw, uniform over [1, MODULUS - 1]."""
        self.state = (MULTIPLIER * self.state) % MODULUS
        return self.state

    def uniform_int(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both bounds inclusive.

        Rejection sampling over the raw stream, so every value in the range
        is exactly equally likely.
        """
        if lo > hi:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        # raw - 1 is uniform over [0, MODULUS - 2]: MODULUS - 1 values.
        limit = (MODULUS - 1) - (MODULUS - 1) % span
        while True:
            v = self.next_raw() - 1
            if v < limit:
                return lo + v % span

    def sample(self, pool: Sequence[T], k: int) -> List[T]:
        """Draw k items from pool uniformly without replacement."""
        if k < 0 or k > len(pool):
            raise ValueError(f"cannot sample {k} from pool of {len(pool)}")
        remaining = list(pool)
        out: List[T] = []
        for _ in range(k):
            idx = self.uniform_int(0, len(remaining) - 1)
            out.append(remaining.pop(idx))
        return out

    def choice(self, pool: Sequence[T]) -> T:
        if not pool:
            raise ValueError("cannot choose from an empty pool")
        return pool[self.uniform_int(0, len(pool) - 1)]
