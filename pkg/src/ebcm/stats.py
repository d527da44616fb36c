"""Comparing click histograms with the reference curves."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .analytic import SlitParams, switched_slits_prediction, two_slit_intensity
from .errors import ConfigError, EmptyRunError
from .model import Geometry

ZERO_NEIGHBOURHOOD = 3


@dataclass(frozen=True)
class ComparisonReport:
    rms_vs_two_slit: float
    rms_vs_switched: float
    visibility: float
    fitted_amplitude: float
    n_pixels_used: int

    def to_dict(self) -> dict:
        return asdict(self)


def normalize_peak(clicks) -> np.ndarray:
    clicks = np.asarray(clicks, dtype=float)
    peak = clicks.max() if clicks.size else 0.0
    if not peak > 0:
        raise EmptyRunError("cannot peak-normalize a histogram without clicks")
    return clicks / peak


def _reference_on_grid(reference: Callable, geom: Geometry, size: int) -> np.ndarray:
    if size != geom.n_pixels:
        raise ValueError(f"histogram has {size} pixels, geometry has {geom.n_pixels}")
    return normalize_peak(reference(geom.theta_centers()))


def rms_error(sim, reference: Callable, geom: Geometry) -> float:
    """RMS distance between a normalized histogram and a peak-normalized reference.

    ``sim`` is used as given; only the reference is normalized here.
    """
    sim = np.asarray(sim, dtype=float)
    ref = _reference_on_grid(reference, geom, sim.size)
    return float(np.sqrt(np.mean((sim - ref) ** 2)))


def fitted_amplitude(sim, reference: Callable, geom: Geometry) -> float:
    """Least-squares scale A for ``sim ~ A * reference(theta)``."""
    sim = np.asarray(sim, dtype=float)
    ref = np.asarray(reference(geom.theta_centers()), dtype=float)
    denom = float(ref @ ref)
    return float(sim @ ref) / denom if denom > 0 else 0.0


def fringe_visibility(sim, geom: Geometry, params: SlitParams | None = None) -> float:
    """(I_max - I_min) / (I_max + I_min) around the central fringe.

    I_max is the maximum over |sin theta| <= 1.5 wavelength/d.  I_min is the
    minimum over +-3 pixels around the pixels nearest the first predicted
    zeros at sin theta = +-wavelength/(2d), so noise in the dark fringes
    cannot push V outside [0, 1].
    """
    params = params or SlitParams.from_geometry(geom)
    sim = np.asarray(sim, dtype=float)
    if sim.size != geom.n_pixels:
        raise ValueError(f"histogram has {sim.size} pixels, geometry has {geom.n_pixels}")
    s = np.sin(geom.theta_centers())
    ratio = params.wavelength / params.d
    window = np.abs(s) <= 1.5 * ratio
    if not window.any():
        raise ConfigError("fringe-visibility window contains no pixels", key="n_pixels")
    i_max = sim[window].max()

    dark = []
    for zero in (-0.5 * ratio, 0.5 * ratio):
        j = int(np.argmin(np.abs(s - zero)))
        lo, hi = max(j - ZERO_NEIGHBOURHOOD, 0), min(j + ZERO_NEIGHBOURHOOD + 1, sim.size)
        dark.append(sim[lo:hi])
    i_min = np.concatenate(dark).min()

    total = i_max + i_min
    if total <= 0:
        return 0.0
    return float(np.clip((i_max - i_min) / total, 0.0, 1.0))


def compare(normalized, geom: Geometry) -> ComparisonReport:
    params = SlitParams.from_geometry(geom)
    normalized = np.asarray(normalized, dtype=float)
    return ComparisonReport(
        rms_vs_two_slit=rms_error(normalized, lambda t: two_slit_intensity(t, params), geom),
        rms_vs_switched=rms_error(normalized, lambda t: switched_slits_prediction(t, params), geom),
        visibility=fringe_visibility(normalized, geom, params),
        fitted_amplitude=fitted_amplitude(normalized, lambda t: two_slit_intensity(t, params), geom),
        n_pixels_used=int(normalized.size),
    )


def compare_table(table) -> ComparisonReport | None:
    """Report for a ``ResultsTable``; None when the run produced no clicks."""
    if table.empty_run:
        return None
    return compare(table.normalized_clicks, table.config.geometry)
