"""Which source fires next, and where/which way its photon leaves."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError
from .model import Geometry, PhotonMessage, Slit, Vec2
from .rng import EmissionRng


@dataclass(frozen=True)
class RandomPerPhoton:
    """Each photon picks S1 or S2 with a fair coin."""


@dataclass(frozen=True)
class AlternatingBlocks:
    """S1 emits ``n`` photons while S2 is blocked, then the roles swap."""

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"block size N must be a positive integer, got {self.n}", key="N")


SourceMode = Union[RandomPerPhoton, AlternatingBlocks]


def block_slit(index: int, n: int) -> Slit:
    return Slit.S1 if (index // n) % 2 == 0 else Slit.S2


@dataclass
class SourceState:
    mode: SourceMode
    emitted_total: int = 0

    @property
    def current(self) -> Slit | None:
        """Unblocked source in alternating mode; None in random mode."""
        if isinstance(self.mode, AlternatingBlocks):
            return block_slit(self.emitted_total, self.mode.n)
        return None


def next_slit(state: SourceState, rng: EmissionRng) -> Slit:
    """Source for the photon with index ``state.emitted_total``.

    The caller bumps ``emitted_total`` after the emission.
    """
    if isinstance(state.mode, AlternatingBlocks):
        return block_slit(state.emitted_total, state.mode.n)
    return Slit.S1 if rng.slit.random() < 0.5 else Slit.S2


def sample_emission(slit: Slit, geom: Geometry, rng: EmissionRng) -> PhotonMessage:
    x = geom.slit_center(slit) + geom.a * (rng.position.random() - 0.5)
    direction = math.pi * (rng.direction.random() - 0.5)
    return PhotonMessage(slit=slit, emission_point=Vec2(x, 0.0), direction=direction)


def slit_batch(mode: SourceMode, start: int, count: int, rng: EmissionRng) -> np.ndarray:
    """Slits (0 = S1, 1 = S2) for photons ``start .. start + count - 1``."""
    if isinstance(mode, AlternatingBlocks):
        idx = np.arange(start, start + count, dtype=np.int64)
        return ((idx // mode.n) % 2).astype(np.int8)
    return (rng.slit.random(count) >= 0.5).astype(np.int8)


def emission_batch(
    slits: np.ndarray, geom: Geometry, rng: EmissionRng
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``sample_emission``: emission x and direction per photon."""
    n = slits.size
    centers = np.where(slits == Slit.S1, -0.5 * geom.d, 0.5 * geom.d)
    x = centers + geom.a * (rng.position.random(n) - 0.5)
    direction = math.pi * (rng.direction.random(n) - 0.5)
    return x, direction


def expected_slit_counts(mode: SourceMode, M: int) -> tuple[int, int] | None:
    """Exact (S1, S2) totals for alternating blocks; None for random mode."""
    if not isinstance(mode, AlternatingBlocks):
        return None
    cycles, rest = divmod(M, 2 * mode.n)
    s1 = cycles * mode.n + min(rest, mode.n)
    return s1, M - s1
