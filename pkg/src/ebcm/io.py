"""CSV histogram + JSON sidecar output.

The CSV carries only deterministic content, so two runs of the same config
and seed give identical bytes.  Wall time and timestamps go to the sidecar.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from . import __version__
from .config import config_echo
from .rng import RNG_ALGORITHM
from .runner import ResultsTable
from .scheduler import expected_slit_counts
from .stats import ComparisonReport

CSV_COLUMNS = (
    "pixel_index",
    "theta_deg",
    "arrivals",
    "clicks",
    "normalized_clicks",
    "analytic_two_slit",
    "analytic_switched",
)
INT_COLUMNS = {"pixel_index", "arrivals", "clicks"}


def _real(x) -> str:
    return format(float(x), ".17g")


def results_csv(table: ResultsTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for k in range(table.clicks.size):
        writer.writerow([
            k,
            _real(table.theta_deg[k]),
            int(table.arrivals[k]),
            int(table.clicks[k]),
            _real(table.normalized_clicks[k]),
            _real(table.analytic_two_slit[k]),
            _real(table.analytic_switched[k]),
        ])
    return buf.getvalue()


def run_metadata(table: ResultsTable) -> dict:
    cfg = table.config
    return {
        "replica": table.replica,
        "effective_seed": table.seed,
        "photons": cfg.M,
        "discarded": table.discarded,
        "arrivals_total": int(table.arrivals.sum()),
        "clicks_total": int(table.clicks.sum()),
        "slit_counts": {"S1": table.slit_counts[0], "S2": table.slit_counts[1]},
        "expected_slit_counts": expected_slit_counts(cfg.mode, cfg.M),
        "wall_time_s": table.wall_time,
        "events_per_second": table.events_per_second,
    }


def write_results(table: ResultsTable, report: ComparisonReport | None,
                  csv_path, json_path=None) -> tuple[Path, Path]:
    """Write the per-pixel CSV and its JSON sidecar; return both paths."""
    csv_path = Path(csv_path)
    json_path = Path(json_path) if json_path else csv_path.with_suffix(".json")
    text = results_csv(table)
    sidecar = {
        "manifest": {
            "config": config_echo(table.config),
            "tool_version": __version__,
            "rng_algorithm": RNG_ALGORITHM,
            "started_at": table.started_at,
            "outputs": {"csv": str(csv_path), "json": str(json_path)},
            "csv_sha256": hashlib.sha256(text.encode()).hexdigest(),
        },
        "run": run_metadata(table),
        "empty_run": table.empty_run,
        "report": report.to_dict() if report is not None else None,
    }
    for path, content in ((csv_path, text), (json_path, json.dumps(sidecar, indent=2) + "\n")):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
    return csv_path, json_path


def read_results_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        rows = list(reader)
    return {
        col: np.array([r[col] for r in rows], dtype=np.int64 if col in INT_COLUMNS else float)
        for col in CSV_COLUMNS
    }
