"""Seeding scheme.

Every run draws from numpy's PCG64 bit generator.  A run with master seed
``s`` and replica index ``r`` seeds ``SeedSequence(s + r)`` and spawns three
child streams, used in this order:

    0  slit choice (random mode only)
    1  emission point across the aperture
    2  emission direction

Each stream only ever produces float64 values via ``Generator.random``,
one 64-bit draw per value, so drawing one at a time or in blocks of any
size gives the same numbers.  Sweep points get their own master seed from
``derive_seed`` and never share a stream with another point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence(seed + replica).spawn(3)"


@dataclass
class EmissionRng:
    slit: np.random.Generator
    position: np.random.Generator
    direction: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int, replica: int = 0) -> EmissionRng:
        if seed < 0 or replica < 0:
            raise ValueError("seed and replica index must be non-negative")
        children = np.random.SeedSequence(seed + replica).spawn(3)
        return cls(*(np.random.Generator(np.random.PCG64(c)) for c in children))


def derive_seed(base_seed: int, index: int) -> int:
    """64-bit seed for sweep point ``index`` under ``base_seed``."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])
