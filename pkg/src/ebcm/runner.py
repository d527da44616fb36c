"""Experiment orchestration: one M-photon run, replicas, and N/gamma sweeps."""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Iterator, Sequence

import numba
import numpy as np

from . import model
from .analytic import SlitParams, switched_slits_prediction, two_slit_intensity
from .errors import ConfigError
from .model import Geometry, PixelState, Slit
from .rng import EmissionRng, derive_seed
from .scheduler import (
    AlternatingBlocks,
    RandomPerPhoton,
    SourceMode,
    SourceState,
    emission_batch,
    next_slit,
    sample_emission,
    slit_batch,
)

log = logging.getLogger(__name__)

CHUNK = 1 << 16
MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: Geometry = field(default_factory=Geometry)
    mode: SourceMode = field(default_factory=RandomPerPhoton)
    M: int = 1_000_000
    gamma: float = 0.999
    threshold: float = 0.25
    seed: int = 0
    replicas: int = 1

    def __post_init__(self):
        if not isinstance(self.geometry, Geometry):
            raise ConfigError("geometry must be a Geometry", key="geometry")
        if not isinstance(self.mode, (RandomPerPhoton, AlternatingBlocks)):
            raise ConfigError(f"unknown source mode {self.mode!r}", key="mode")
        _check_int(self.M, "M", 1)
        if isinstance(self.mode, AlternatingBlocks) and self.mode.n > self.M:
            raise ConfigError(f"block size N={self.mode.n} exceeds M={self.M}", key="N")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError(f"gamma must lie in (0, 1), got {self.gamma}", key="gamma")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(
                f"threshold must lie in (0, 1), got {self.threshold}", key="threshold"
            )
        _check_int(self.seed, "seed", 0, MAX_SEED)
        _check_int(self.replicas, "replicas", 1)


def _check_int(value, key, lo, hi=None):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigError(f"{key} must be an integer, got {value!r}", key=key)
    if value < lo or (hi is not None and value > hi):
        bounds = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise ConfigError(f"{key} must be {bounds}, got {value}", key=key)


@dataclass
class ResultsTable:
    theta_center: np.ndarray
    arrivals: np.ndarray
    clicks: np.ndarray
    normalized_clicks: np.ndarray
    analytic_two_slit: np.ndarray
    analytic_switched: np.ndarray
    config: ExperimentConfig
    replica: int
    seed: int
    discarded: int
    slit_counts: tuple[int, int]
    wall_time: float
    started_at: str = ""

    @property
    def empty_run(self) -> bool:
        return int(self.clicks.sum()) == 0

    @property
    def theta_deg(self) -> np.ndarray:
        return np.degrees(self.theta_center)

    @property
    def events_per_second(self) -> float:
        return self.config.M / self.wall_time if self.wall_time > 0 else math.inf


_ray_circle = numba.njit(cache=True)(model.ray_circle)
_phase_angle = numba.njit(cache=True)(model.phase_angle)


@numba.njit(cache=True)
def _event_kernel(x_emit, direction, radius, theta_min, width, gamma, threshold,
                  px, py, clicks, arrivals):
    n_pixels = px.size
    t2 = threshold * threshold
    g1 = 1.0 - gamma
    discarded = 0
    for k in range(x_emit.size):
        path, angle = _ray_circle(x_emit[k], direction[k], radius)
        i = math.floor((angle - theta_min) / width)
        if i < 0 or i >= n_pixels:
            discarded += 1
            continue
        phi = _phase_angle(path, 1.0)
        x = gamma * px[i] + g1 * math.cos(phi)
        y = gamma * py[i] + g1 * math.sin(phi)
        arrivals[i] += 1
        if x * x + y * y >= t2:
            clicks[i] += 1
            x = 0.0
            y = 0.0
        px[i] = x
        py[i] = y
    return discarded


def _loop_compiled(config, rng):
    geom = config.geometry
    n = geom.n_pixels
    px, py = np.zeros(n), np.zeros(n)
    clicks = np.zeros(n, dtype=np.int64)
    arrivals = np.zeros(n, dtype=np.int64)
    discarded = 0
    n_s1 = 0
    for start in range(0, config.M, CHUNK):
        count = min(CHUNK, config.M - start)
        slits = slit_batch(config.mode, start, count, rng)
        x, direction = emission_batch(slits, geom, rng)
        n_s1 += int(np.count_nonzero(slits == Slit.S1))
        discarded += _event_kernel(x, direction, geom.X, geom.theta_min, geom.pixel_width,
                                   config.gamma, config.threshold, px, py, clicks, arrivals)
    return arrivals, clicks, discarded, (n_s1, config.M - n_s1)


def _loop_reference(config, rng):
    """Photon-at-a-time loop over the public scalar operations."""
    geom = config.geometry
    pixels = [PixelState()] * geom.n_pixels
    state = SourceState(config.mode)
    discarded = 0
    per_slit = [0, 0]
    for _ in range(config.M):
        slit = next_slit(state, rng)
        msg = sample_emission(slit, geom, rng)
        state.emitted_total += 1
        per_slit[slit] += 1
        hit = model.trace_to_pixel(msg, geom)
        if hit is None:
            discarded += 1
            continue
        k, path_length = hit
        e = model.message_phase(path_length)
        pixels[k], _ = model.register_arrival(pixels[k], e, config.gamma, config.threshold)
    arrivals = np.array([p.arrivals for p in pixels], dtype=np.int64)
    clicks = np.array([p.clicks for p in pixels], dtype=np.int64)
    return arrivals, clicks, discarded, tuple(per_slit)


def run_experiment(config: ExperimentConfig, replica: int = 0,
                   engine: str = "compiled") -> ResultsTable:
    """Run ``config.M`` photons through the detector and tabulate the clicks.

    ``engine="reference"`` walks the scalar operations one photon at a time;
    it is slow and exists to cross-check the compiled loop.
    """
    loops = {"compiled": _loop_compiled, "reference": _loop_reference}
    if engine not in loops:
        raise ValueError(f"unknown engine {engine!r}")
    rng = EmissionRng.from_seed(config.seed, replica)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    arrivals, clicks, discarded, slit_counts = loops[engine](config, rng)
    wall = time.perf_counter() - t0

    theta = config.geometry.theta_centers()
    params = SlitParams.from_geometry(config.geometry)
    peak = clicks.max() if clicks.size else 0
    if peak > 0:
        normalized = clicks / peak
    else:
        log.warning("run with seed %d replica %d produced no clicks", config.seed, replica)
        normalized = np.zeros(clicks.size)
    return ResultsTable(
        theta_center=theta,
        arrivals=arrivals,
        clicks=clicks,
        normalized_clicks=normalized,
        analytic_two_slit=two_slit_intensity(theta, params),
        analytic_switched=switched_slits_prediction(theta, params),
        config=config,
        replica=replica,
        seed=config.seed + replica,
        discarded=discarded,
        slit_counts=slit_counts,
        wall_time=wall,
        started_at=started,
    )


def _run_job(job):
    config, replica = job
    return run_experiment(config, replica)


def _map(jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, so the output never depends on timing
        return list(pool.map(_run_job, jobs))


def run_replicas(config: ExperimentConfig, workers: int = 1) -> list[ResultsTable]:
    return _map([(config, r) for r in range(config.replicas)], workers)


@dataclass
class SweepResult:
    tables: list[ResultsTable]
    failures: list[tuple[dict, str]]

    def __iter__(self) -> Iterator[ResultsTable]:
        return iter(self.tables)

    def __len__(self) -> int:
        return len(self.tables)

    def select(self, n: int | None, gamma: float) -> list[ResultsTable]:
        """Replica tables for block size ``n`` (None = random mode) and ``gamma``."""
        return [t for t in self.tables if _block_n(t.config.mode) == n and t.config.gamma == gamma]


def _block_n(mode):
    return mode.n if isinstance(mode, AlternatingBlocks) else None


def sweep_points(base: ExperimentConfig, n_values: Sequence[int | None],
                 gamma_values: Sequence[float]):
    """Yield ``(point, config_or_error)`` over the N x gamma grid, N outermost.

    ``None`` in ``n_values`` selects random mode.  Each grid point gets its
    own seed derived from ``base.seed`` and its position in the grid.
    """
    index = 0
    for n in n_values:
        for gamma in gamma_values:
            point = {"N": n, "gamma": gamma}
            try:
                mode = RandomPerPhoton() if n is None else AlternatingBlocks(n)
                cfg = replace(base, mode=mode, gamma=gamma, seed=derive_seed(base.seed, index))
            except ConfigError as exc:
                yield point, exc
            else:
                yield point, cfg
            index += 1


def run_sweep(base: ExperimentConfig, n_values: Sequence[int | None],
              gamma_values: Sequence[float], workers: int = 1) -> SweepResult:
    if not n_values or not gamma_values:
        raise ConfigError("sweep needs at least one N and one gamma value")
    jobs, failures = [], []
    for point, cfg in sweep_points(base, n_values, gamma_values):
        if isinstance(cfg, ConfigError):
            log.error("skipping sweep point %s: %s", point, cfg)
            failures.append((point, str(cfg)))
            continue
        jobs.extend((cfg, r) for r in range(cfg.replicas))
    return SweepResult(_map(jobs, workers), failures)
