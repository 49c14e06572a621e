"""Deterministic seed derivation for nested experiment streams.

Every random quantity in the package is drawn from a PCG64 generator whose
seed is either given by the user or derived from a master seed plus a short
integer path (stream tag, node index, trial index).  Derivation goes through
``numpy.random.SeedSequence`` so independent streams never collide.
"""

from __future__ import annotations

import numpy as np

# Stream tags keep derived seeds for different purposes disjoint.
SIGNAL_STREAM = 1
NOISE_STREAM = 2
PROFILE_STREAM = 3
MOMENT_STREAM = 4

__all__ = [
    "SIGNAL_STREAM",
    "NOISE_STREAM",
    "PROFILE_STREAM",
    "MOMENT_STREAM",
    "derive_seed",
    "rng_from",
]


def derive_seed(*path: int) -> int:
    """Hash an integer path (master seed, tag, indices...) into a 64-bit seed."""
    entropy = [int(p) & 0xFFFFFFFFFFFFFFFF for p in path]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def rng_from(seed) -> np.random.Generator:
    """Build a PCG64 generator from an integer seed; pass generators through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed)))
