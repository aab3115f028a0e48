"""
Counter-based random streams.

Units are drawn in fixed blocks; block b of seed s always comes from the
same Philox stream, so a dataset does not depend on how its blocks are
scheduled across workers.
"""

from collections.abc import Iterator

import numpy as np

from src.model.spec import SpecError

BLOCK_UNITS = 4096
MAX_SEED = 2**64 - 1

# stream ids
GENERATION_STREAM = 0
ORACLE_STREAM = 1


def check_seed(seed: int) -> int:
    """Validate a 64-bit seed."""
    if isinstance(seed, bool) or not isinstance(seed, int | np.integer):
        raise SpecError(f"Seed must be an integer, got {seed!r}")
    value = int(seed)
    if not 0 <= value <= MAX_SEED:
        raise SpecError(f"Seed must lie in 0..2**64-1, got {value}")
    return value


def block_generator(seed: int, block: int, stream: int = GENERATION_STREAM) -> np.random.Generator:
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=(stream, block))
    return np.random.Generator(np.random.Philox(sequence))


def block_layout(n: int, units: int = BLOCK_UNITS) -> Iterator[tuple[int, int]]:
    """(block index, block size) pairs covering n units."""
    for block, start in enumerate(range(0, n, units)):
        yield block, min(units, n - start)
