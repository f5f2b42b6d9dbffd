"""Deterministic random-stream derivation.

All simulation entry points accept one integer master seed. Independent
substreams (per arm, per replicate) are derived through seed-sequence spawn
keys over a counter-based bit generator, so the draws a subject receives do
not depend on how work is batched or scheduled.
"""

from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence"


def child_seed(seed: int, *path: int) -> np.random.SeedSequence:
    """Seed sequence for the substream addressed by ``path`` under ``seed``."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))


def make_generator(seed) -> np.random.Generator:
    """Philox generator for an integer seed or a SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(entropy=int(seed))
    return np.random.Generator(np.random.Philox(seed))


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the substream addressed by ``path`` under ``seed``."""
    return make_generator(child_seed(seed, *path))
