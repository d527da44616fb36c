"""Event-by-event simulation of two-source interference with memory detectors."""

__version__ = "0.1.0"

from .analytic import (
    SlitParams,
    single_slit_intensity,
    switched_slits_prediction,
    two_slit_intensity,
)
from .errors import ConfigError, EmptyRunError
from .model import (
    Geometry,
    PhotonMessage,
    PixelState,
    Slit,
    Vec2,
    message_phase,
    register_arrival,
    trace_to_pixel,
    update_pixel,
)
from .runner import ExperimentConfig, ResultsTable, run_experiment, run_replicas, run_sweep
from .scheduler import AlternatingBlocks, RandomPerPhoton, SourceState, next_slit, sample_emission
from .stats import ComparisonReport, compare, fringe_visibility, normalize_peak, rms_error
