"""Fixed-capacity episodic memory with probabilistic substitution.

The buffer starts empty and appends every observed sample until it
reaches capacity (the fill phase). Once full, new samples displace
stored ones under a configurable strategy; the strategies differ only in
how often the substitution sweep runs, which changes turnover by orders
of magnitude:

* ``per-element``: every stored slot is independently overwritten with
  probability p for *each* observed sample. Old content decays like
  (1-p)^observations, i.e. it is nearly gone after one 100-sample batch.
* ``per-sample``: each observed sample overwrites one uniformly random
  slot with probability p, otherwise it is discarded.
* ``per-batch`` (default): one sweep per observed batch; each slot is
  replaced with probability p by a uniformly drawn member of that batch.
  Old content decays like (1-p)^batches, which retains samples from a
  previous data source for many updates after a switch.

Replay is drawn uniformly with replacement, so a draw size larger than
the number of distinct stored samples stays well-defined.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .dataset import WindowedSample
from .rng import SeededRng


class SubstitutionStrategy(str, Enum):
    PER_ELEMENT = "per-element"
    PER_SAMPLE = "per-sample"
    PER_BATCH = "per-batch"


@dataclass
class MemoryConfig:
    capacity: int = 10000
    substitution_probability: float = 0.1
    strategy: SubstitutionStrategy = SubstitutionStrategy.PER_BATCH

    def validate(self) -> None:
        if self.capacity < 1:
            raise ValueError(f"MemoryConfig.capacity must be >= 1, got {self.capacity}")
        if not 0.0 <= self.substitution_probability <= 1.0:
            raise ValueError(
                f"MemoryConfig.substitution_probability must be in [0, 1], "
                f"got {self.substitution_probability}"
            )
        self.strategy = SubstitutionStrategy(self.strategy)


@dataclass
class OccupancyStats:
    counts: dict[str, int]
    fractions: dict[str, float]


class EpisodicMemory:
    """Single-owner sample buffer; mutations must stay sequential."""

    def __init__(self, config: MemoryConfig):
        config.validate()
        self.config = config
        self.slots: list[WindowedSample] = []
        self.observed_count = 0
        # samples observed one-by-one post-fill under per-batch, held back
        # until the next batch boundary
        self._pending: list[WindowedSample] = []

    def __len__(self) -> int:
        return len(self.slots)

    @property
    def is_full(self) -> bool:
        return len(self.slots) >= self.config.capacity

    def observe(self, sample: WindowedSample, rng: SeededRng) -> None:
        """Absorb one sample: append while filling, substitute once full."""
        self.observed_count += 1
        if len(self.slots) < self.config.capacity:
            self.slots.append(sample)
            return
        p = self.config.substitution_probability
        strategy = self.config.strategy
        if strategy is SubstitutionStrategy.PER_ELEMENT:
            for idx in range(len(self.slots)):
                if rng.random() < p:
                    self.slots[idx] = sample
        elif strategy is SubstitutionStrategy.PER_SAMPLE:
            if rng.random() < p:
                self.slots[rng.randbelow(len(self.slots))] = sample
        else:
            self._pending.append(sample)

    def observe_batch(self, batch: list[WindowedSample], rng: SeededRng) -> None:
        """Absorb a batch; under per-batch, run one substitution sweep."""
        batch = list(batch)
        if not batch:
            raise ValueError("observe_batch: empty batch")
        if self.config.strategy is not SubstitutionStrategy.PER_BATCH:
            for sample in batch:
                self.observe(sample, rng)
            return
        self.observed_count += len(batch)
        pool = self._pending + batch
        self._pending = []
        filled = 0
        while len(self.slots) < self.config.capacity and filled < len(pool):
            self.slots.append(pool[filled])
            filled += 1
        rest = pool[filled:]
        if rest:
            p = self.config.substitution_probability
            for idx in range(len(self.slots)):
                if rng.random() < p:
                    self.slots[idx] = rest[rng.randbelow(len(rest))]

    def draw_replay(self, n: int, rng: SeededRng) -> list[WindowedSample]:
        """n independent uniform draws with replacement from current slots."""
        if n < 0:
            raise ValueError(f"draw_replay: n must be >= 0, got {n}")
        if n == 0:
            return []
        if not self.slots:
            raise ValueError("draw_replay: memory is empty")
        size = len(self.slots)
        return [self.slots[rng.randbelow(size)] for _ in range(n)]

    def occupancy_stats(self) -> OccupancyStats:
        """Per-origin-label slot counts and fractions (fractions sum to 1)."""
        counts = Counter(sample.label for sample in self.slots)
        total = len(self.slots)
        fractions = {label: count / total for label, count in counts.items()} if total else {}
        return OccupancyStats(counts=dict(counts), fractions=fractions)
