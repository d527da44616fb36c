"""Photon messages, detector pixels and the source/detector geometry.

All lengths are stored in units of the wavelength, so the wavelength used by
the phase computation is 1 unless a caller says otherwise.  ``Geometry``
keeps the physical wavelength (in nm) only for reporting and config echo.

Coordinates: the two slits sit on the line y = 0 at x = -d/2 (S1) and
x = +d/2 (S2).  The detector is a circular arc of radius X centred on the
midpoint between the slits.  Angles are measured from the +y axis, positive
towards +x.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError

DEFAULT_WAVELENGTH_NM = 670.0


class Slit(enum.IntEnum):
    S1 = 0
    S2 = 1


class Vec2(NamedTuple):
    x: float
    y: float

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


ZERO = Vec2(0.0, 0.0)


@dataclass(frozen=True)
class Geometry:
    """Two-slit source plane plus circular detector arc.

    ``d``, ``a`` and ``X`` are in wavelengths.  ``theta_min``/``theta_max``
    are radians and bound the detector arc, which is split into
    ``n_pixels`` equal angular bins.
    """

    d: float = 5.0
    a: float = 1.0
    X: float = 50_000.0 / DEFAULT_WAVELENGTH_NM
    n_pixels: int = 181
    theta_min: float = -math.pi / 2
    theta_max: float = math.pi / 2
    wavelength_nm: float = DEFAULT_WAVELENGTH_NM

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigError(f"slit width a must be > 0, got {self.a}", key="a")
        if not self.d > self.a:
            raise ConfigError(
                f"slit separation d must exceed slit width a ({self.a}), got {self.d}",
                key="d",
            )
        if not self.X > self.d:
            raise ConfigError(
                f"detector radius X must exceed d ({self.d}), got {self.X}", key="X"
            )
        if not math.isfinite(self.X):
            raise ConfigError("detector radius X must be finite", key="X")
        if not self.wavelength_nm > 0:
            raise ConfigError(
                f"wavelength must be > 0, got {self.wavelength_nm}", key="lambda"
            )
        if isinstance(self.n_pixels, bool) or int(self.n_pixels) != self.n_pixels:
            raise ConfigError("n_pixels must be an integer", key="n_pixels")
        if self.n_pixels < 3:
            raise ConfigError(f"n_pixels must be >= 3, got {self.n_pixels}", key="n_pixels")
        if not -math.pi / 2 <= self.theta_min < self.theta_max <= math.pi / 2:
            raise ConfigError(
                "detector arc must satisfy -90 deg <= theta_min < theta_max <= 90 deg",
                key="theta_min",
            )

    @classmethod
    def from_nm(cls, d: float, a: float, wavelength: float, X: float, **kw) -> Geometry:
        """Build a geometry from physical lengths in nanometres."""
        if not wavelength > 0:
            raise ConfigError(f"wavelength must be > 0, got {wavelength}", key="lambda")
        return cls(d=d / wavelength, a=a / wavelength, X=X / wavelength,
                   wavelength_nm=wavelength, **kw)

    @property
    def pixel_width(self) -> float:
        return (self.theta_max - self.theta_min) / self.n_pixels

    def theta_edges(self) -> np.ndarray:
        return self.theta_min + self.pixel_width * np.arange(self.n_pixels + 1)

    def theta_centers(self) -> np.ndarray:
        return self.theta_min + self.pixel_width * (np.arange(self.n_pixels) + 0.5)

    def slit_center(self, slit: Slit) -> float:
        return -0.5 * self.d if slit == Slit.S1 else 0.5 * self.d

    def pixel_of(self, angle: float) -> int | None:
        """Index of the bin [theta_k, theta_k+1) holding ``angle``, or None."""
        k = math.floor((angle - self.theta_min) / self.pixel_width)
        if 0 <= k < self.n_pixels:
            return k
        return None


@dataclass(frozen=True)
class PhotonMessage:
    slit: Slit
    emission_point: Vec2
    direction: float
    path_length: float | None = None
    phase: Vec2 | None = None


class PixelState(NamedTuple):
    p: Vec2 = ZERO
    clicks: int = 0
    arrivals: int = 0


# Scalar kernels shared with the compiled event loop in runner.py; keep them
# to plain float arithmetic and the math module so numba can compile them.

def phase_angle(path_length, wavelength):
    return 2.0 * math.pi * ((path_length % wavelength) / wavelength)


def ray_circle(x_emit, direction, radius):
    """Distance along the ray from (x_emit, 0) to the circle, and the hit angle."""
    s = math.sin(direction)
    c = math.cos(direction)
    t = -x_emit * s + math.sqrt(radius * radius - x_emit * x_emit * c * c)
    return t, math.atan2(x_emit + t * s, t * c)


def message_phase(path_length: float, wavelength: float = 1.0) -> Vec2:
    """Unit phase vector of a photon that has travelled ``path_length``.

    The path is reduced modulo the wavelength before the trig call, so the
    phase error does not grow with the detector distance.
    """
    if not wavelength > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    phi = phase_angle(path_length, wavelength)
    return Vec2(math.cos(phi), math.sin(phi))


def update_pixel(p: Vec2, e: Vec2, gamma: float) -> Vec2:
    return Vec2(gamma * p.x + (1.0 - gamma) * e.x, gamma * p.y + (1.0 - gamma) * e.y)


def register_arrival(
    pixel: PixelState, e: Vec2, gamma: float, threshold: float
) -> tuple[PixelState, bool]:
    """Feed one photon into a pixel.

    The pixel clicks once ``|p|`` reaches ``threshold`` and its memory is
    then cleared to the zero vector.
    """
    p = update_pixel(pixel.p, e, gamma)
    arrivals = pixel.arrivals + 1
    if p.x * p.x + p.y * p.y >= threshold * threshold:
        return PixelState(ZERO, pixel.clicks + 1, arrivals), True
    return PixelState(p, pixel.clicks, arrivals), False


def trace_to_pixel(msg: PhotonMessage, geom: Geometry) -> tuple[int, float] | None:
    """Follow a photon to the detector arc.

    Returns ``(pixel_index, path_length)``, or None when the ray lands
    outside the arc and the photon has to be discarded.
    """
    path_length, angle = ray_circle(msg.emission_point.x, msg.direction, geom.X)
    k = geom.pixel_of(angle)
    if k is None:
        return None
    return k, path_length


def first_click_arrival(gamma: float, threshold: float) -> int:
    """Arrivals needed for a click from the zero state under a constant phase."""
    return math.ceil(math.log1p(-threshold) / math.log(gamma))
