"""Seeded, splittable random streams.

Every piece of randomness in the toolkit flows from a single integer seed.
Substreams are derived from (seed, *key) tuples via a counter-based Philox
generator, so a computation keyed by (command, trial, bag) produces the same
draws whether trials run serially or in parallel.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream"]


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for the given (seed, *key) tuple."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
