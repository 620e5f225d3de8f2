"""Monte Carlo estimate of the expected maximal occupancy.

This shares no code with the exact engine; it exists to cross-check it.

Replications are split into fixed blocks of ``BLOCK`` and block ``b`` draws
from ``PCG64(SeedSequence(seed, spawn_key=(b,)))``.  Since the assignment
of replications to streams does not depend on how many workers run the
blocks, the merged result is the same for any worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exact import ProblemSpec

BLOCK = 4096
RNG_ALGORITHM = "numpy.PCG64 seeded by SeedSequence(seed, spawn_key=(block,)), block=4096"


@dataclass(frozen=True)
class SimConfig:
    spec: ProblemSpec
    rounds: int
    samples: int
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("need at least one replication")
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SimResult:
    config: SimConfig
    mean_max: float
    std_error: float
    histogram: dict
    elapsed: float = 0.0
    rng: str = RNG_ALGORITHM
    metadata: dict = field(default_factory=dict)

    def z_score(self, exact_mean) -> float:
        diff = self.mean_max - float(exact_mean)
        if self.std_error == 0:
            return 0.0 if diff == 0 else float("inf")
        return diff / self.std_error

    def to_json(self) -> dict:
        c = self.config
        return {
            "config": {"n": c.spec.n, "r": c.spec.r, "T": c.rounds, "samples": c.samples, "seed": c.seed},
            "rng": self.rng,
            "meanMax": repr(self.mean_max),
            "stdError": repr(self.std_error),
            "histogram": {str(m): k for m, k in sorted(self.histogram.items())},
        }


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def draw_subsets(rng: np.random.Generator, n: int, r: int, size: int, perm=None) -> np.ndarray:
    """``size`` uniform r-subsets of range(n) by a partial Fisher-Yates shuffle.

    ``perm`` (size x n) is shuffled in place when given; any starting
    arrangement yields uniform subsets.
    """
    if perm is None:
        perm = np.tile(np.arange(n), (size, 1))
    rows = np.arange(size)
    for j in range(r):
        k = rng.integers(j, n, size=size)
        a = perm[rows, j].copy()
        perm[rows, j] = perm[rows, k]
        perm[rows, k] = a
    return perm[:, :r]


def _run_block(spec: ProblemSpec, rounds: int, seed: int, block: int, count: int) -> np.ndarray:
    rng = block_rng(seed, block)
    occ = np.zeros((count, spec.n), dtype=np.int64)
    perm = np.tile(np.arange(spec.n), (count, 1))
    rows = np.arange(count)[:, None]
    for _ in range(rounds):
        chosen = draw_subsets(rng, spec.n, spec.r, count, perm)
        occ[rows, chosen] += 1
    return occ.max(axis=1)


def run(config: SimConfig, workers: int = 1) -> SimResult:
    """Simulate ``config.samples`` independent runs of ``config.rounds`` rounds."""
    started = time.perf_counter()
    blocks = [(b, min(BLOCK, config.samples - b * BLOCK)) for b in range(-(-config.samples // BLOCK))]

    def job(item):
        b, count = item
        return _run_block(config.spec, config.rounds, config.seed, b, count)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, blocks))
    else:
        parts = [job(item) for item in blocks]
    maxima = np.concatenate(parts)
    mean = float(maxima.mean())
    if config.samples > 1:
        std_error = float(maxima.std(ddof=1) / np.sqrt(config.samples))
    else:
        std_error = 0.0
    values, counts = np.unique(maxima, return_counts=True)
    histogram = {int(v): int(c) for v, c in zip(values, counts)}
    return SimResult(config, mean, std_error, histogram, time.perf_counter() - started)
