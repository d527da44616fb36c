"""Far-field wave-optics reference curves.

All functions accept scalar or array angles (radians) and broadcast.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Geometry


@dataclass(frozen=True)
class SlitParams:
    a: float
    d: float
    wavelength: float = 1.0
    A: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.d > 0 and self.wavelength > 0 and self.A > 0):
            raise ValueError("slit parameters a, d, wavelength and A must all be > 0")

    @classmethod
    def from_geometry(cls, geom: Geometry, A: float = 1.0) -> SlitParams:
        return cls(a=geom.a, d=geom.d, wavelength=1.0, A=A)


def _envelope(theta, a, wavelength):
    # np.sinc(x) = sin(pi x) / (pi x), with the x = 0 limit handled
    return np.sinc(a * np.sin(theta) / wavelength) ** 2


def single_slit_intensity(theta, a: float, wavelength: float = 1.0, A: float = 1.0):
    return A * _envelope(theta, a, wavelength)


def two_slit_intensity(theta, params: SlitParams):
    fringes = np.cos(np.pi * params.d * np.sin(theta) / params.wavelength) ** 2
    return params.A * _envelope(theta, params.a, params.wavelength) * fringes


def switched_slits_prediction(theta, params: SlitParams):
    """Incoherent sum of the two single-slit patterns.

    Both envelopes are centred on theta = 0 (the slit offsets are dropped,
    as in the far-field two-slit formula).
    """
    s1 = single_slit_intensity(theta, params.a, params.wavelength, params.A)
    s2 = single_slit_intensity(theta, params.a, params.wavelength, params.A)
    return s1 + s2
