"""Seeded random streams.

Every random draw in the package comes from ``stream_rng(seed, *keys)``, so a
result depends only on the master seed and the stream keys, never on the
order in which workers happen to run.
"""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1


def stream_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the stream (seed, *keys)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(k) for k in keys)]))


def derive_seed(seed: int, *keys: int) -> int:
    """A child seed for the instance (seed, *keys).

    Violations record it, so one instance can be rerun alone.
    """
    state = np.random.SeedSequence([int(seed), *(int(k) for k in keys)]).generate_state(1, dtype=np.uint64)
    return int(state[0])
