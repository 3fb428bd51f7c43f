"""Seedable random numbers with reproducible, splittable streams.

The core generator is SplitMix64 (Steele, Lea & Flood 2014), a 64-bit
recurrence small enough to write down in full:

    state  = (state + 0x9E3779B97F4A7C15)            mod 2**64
    z      = state
    z      = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9    mod 2**64
    z      = (z ^ (z >> 27)) * 0x94D049BB133111EB    mod 2**64
    output = z ^ (z >> 31)

An explicit recurrence instead of a platform generator keeps the integer
stream bit-identical across interpreters, platforms and library versions;
the golden-sequence test pins it.

Independent child streams come from ``split(label)``: the child seed is
the SplitMix64 mix of (parent seed XOR FNV-1a(label)). A child therefore
depends only on (seed, label), never on how far the parent stream has
advanced, so enabling one consumer cannot shift another's sequence.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_INV_2_53 = 2.0 ** -53


def _mix64(x: int) -> int:
    """SplitMix64 output function applied to a single 64-bit value."""
    z = (x + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def _fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


class SeededRng:
    """Deterministic single-consumer random stream.

    Not thread-safe by design: concurrency is obtained by ``split``,
    never by sharing one instance.
    """

    __slots__ = ("seed", "_state", "_gauss")

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._state = self.seed
        self._gauss: float | None = None

    def __repr__(self) -> str:
        return f"SeededRng(seed=0x{self.seed:016x})"

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN_GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by masked rejection (exactly uniform)."""
        if n <= 0:
            raise ValueError(f"randbelow: n must be positive, got {n}")
        if n == 1:
            return 0
        mask = (1 << (n - 1).bit_length()) - 1
        while True:
            r = self.next_u64() & mask
            if r < n:
                return r

    def standard_normal(self) -> float:
        """N(0, 1) via Box-Muller; the paired value is cached."""
        if self._gauss is not None:
            z = self._gauss
            self._gauss = None
            return z
        # u1 in (0, 1] so the log never sees zero
        u1 = ((self.next_u64() >> 11) + 1) * _INV_2_53
        u2 = (self.next_u64() >> 11) * _INV_2_53
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._gauss = r * math.sin(theta)
        return r * math.cos(theta)

    def truncated_normal(self, limit: float = 3.0) -> float:
        """Standard normal rejected until |z| <= limit."""
        while True:
            z = self.standard_normal()
            if abs(z) <= limit:
                return z

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), by partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError(f"sample_indices: need 0 <= k <= n, got k={k}, n={n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.randbelow(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def split(self, label: str) -> "SeededRng":
        """Independent child stream determined by (seed, label) only."""
        return SeededRng(_mix64(self.seed ^ _fnv1a64(label)))

    def get_state(self) -> dict:
        return {"seed": self.seed, "state": self._state, "gauss": self._gauss}

    @classmethod
    def from_state(cls, state: dict) -> "SeededRng":
        rng = cls(state["seed"])
        rng._state = state["state"] & _MASK64
        rng._gauss = state["gauss"]
        return rng
