"""
Reproducible random streams.

Every stream is derived from the experiment seed plus integer keys (game
index, environment index, replay slot, step), so results do not depend on
worker scheduling.
"""

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence]


def derive_seed_sequence(seed: SeedLike, *keys: int) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        entropy = seed.entropy
        keys = tuple(seed.spawn_key) + tuple(keys)
    else:
        entropy = int(seed)
    return np.random.SeedSequence(entropy, spawn_key=tuple(int(k) for k in keys))


def derive_rng(seed: SeedLike, *keys: int) -> np.random.Generator:
    """PCG64 generator for (seed, *keys)"""
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(seed, *keys)))


def derive_int_seed(seed: SeedLike, *keys: int) -> int:
    return int(derive_seed_sequence(seed, *keys).generate_state(1, dtype=np.uint32)[0])
