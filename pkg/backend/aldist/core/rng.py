"""
Seeded random streams.

Replication ``i`` of a run seeded with ``seed`` always draws from the same
counter-based Philox stream, whichever worker executes it.
"""
import numpy as np


def replication_rng(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)])))


def child_seed(rng: np.random.Generator) -> int:
    """Draw a 32-bit seed for a library that wants an integer random_state."""
    return int(rng.integers(0, 2**31 - 1))
