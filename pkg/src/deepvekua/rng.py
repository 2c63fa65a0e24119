"""Seeded random streams.

All randomness goes through NumPy's Philox-4x64 generator, a counter-based
64-bit bit generator (Salmon et al., "Parallel random numbers: as easy as
1, 2, 3", SC'11) keyed directly by the integer seed. Philox has a published
reference algorithm, so any language can reproduce the raw stream from the
same key; the float transforms on top are NumPy's ``Generator`` methods.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(key=int(seed)))


def substream(seed: int, tag: int) -> np.random.Generator:
    """Independent stream for a (seed, tag) pair, e.g. data vs. model init."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(tag), 0]))
