"""Command-line entry point: ``ebcm run | sweep | compare``.

Exit codes: 0 success, 1 invalid configuration, 2 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import load_config
from .errors import ConfigError, EmptyRunError
from .io import read_results_csv, write_results
from .runner import ExperimentConfig, run_replicas, run_sweep
from .scheduler import AlternatingBlocks, RandomPerPhoton
from .stats import compare, compare_table

log = logging.getLogger("ebcm")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


def _int_list(text: str) -> list[int | None]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        out.append(None if tok == "random" else int(tok))
    return out


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",")]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value config file (default: built-in two-slit setup)")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    p.add_argument("--gamma", type=float, help="detector memory parameter")
    p.add_argument("--block-n", type=int, help="switch to alternating blocks of this size")
    p.add_argument("--photons", type=int, help="total photons M")
    p.add_argument("--threshold", type=float, help="click threshold on |p|")
    p.add_argument("--pixels", type=int, help="number of detector pixels")
    p.add_argument("--replicas", type=int, help="independent replicas per run")
    p.add_argument("--workers", type=int, default=1, help="processes for replicas/sweep points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ebcm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    _add_common(run)

    sweep = sub.add_parser("sweep", help="sweep block size N and gamma")
    _add_common(sweep)
    sweep.add_argument("--n-values", type=_int_list, default=[1, 1000, 100000, 500000],
                       help="comma-separated block sizes; 'random' selects random mode")
    sweep.add_argument("--gamma-values", type=_float_list, default=[0.999],
                       help="comma-separated gamma values")

    cmp_ = sub.add_parser("compare", help="recompute the comparison report from a results CSV")
    cmp_.add_argument("csv", type=Path)
    cmp_.add_argument("--config", type=Path,
                      help="config for the CSV (default: the JSON sidecar next to it)")
    cmp_.add_argument("--out", type=Path, help="write the report JSON here instead of stdout")
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    geom = cfg.geometry
    if args.pixels is not None:
        geom = replace(geom, n_pixels=args.pixels)
    mode = AlternatingBlocks(args.block_n) if args.block_n is not None else cfg.mode
    overrides = {
        "M": args.photons,
        "gamma": args.gamma,
        "threshold": args.threshold,
        "seed": args.seed,
        "replicas": args.replicas,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, geometry=geom, mode=mode, **overrides)


def _label(table) -> str:
    mode = table.config.mode
    n = f"N{mode.n}" if isinstance(mode, AlternatingBlocks) else "random"
    return f"{n}_g{table.config.gamma!r}_r{table.replica}"


def _emit(tables, out: Path, prefix: str) -> list[dict]:
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for table in tables:
        report = compare_table(table)
        csv_path, json_path = write_results(table, report, out / f"{prefix}_{_label(table)}.csv")
        summary.append({"csv": str(csv_path), "json": str(json_path),
                        "report": report.to_dict() if report else None})
        vis = f"V={report.visibility:.3f} rms={report.rms_vs_two_slit:.3f}" if report else "no clicks"
        print(f"{csv_path}: {vis} ({table.wall_time:.2f} s)")
    return summary


def cmd_run(args) -> int:
    cfg = resolve_config(args)
    _emit(run_replicas(cfg, workers=args.workers), args.out, "run")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    result = run_sweep(cfg, args.n_values, args.gamma_values, workers=args.workers)
    summary = _emit(result.tables, args.out, "sweep")
    doc = {"runs": summary, "failures": [{"point": p, "error": e} for p, e in result.failures]}
    with open(args.out / "sweep_summary.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")
    for point, err in result.failures:
        print(f"failed {point}: {err}", file=sys.stderr)
    return EXIT_CONFIG if result.failures else EXIT_OK


def cmd_compare(args) -> int:
    config_path = args.config or args.csv.with_suffix(".json")
    geom = load_config(config_path).geometry
    data = read_results_csv(args.csv)
    if data["clicks"].size != geom.n_pixels:
        raise ConfigError(f"{args.csv} has {data['clicks'].size} rows, config has "
                          f"{geom.n_pixels} pixels", key="n_pixels")
    report = compare(data["normalized_clicks"], geom)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": cmd_run, "sweep": cmd_sweep, "compare": cmd_compare}
    try:
        return handlers[args.command](args)
    except (ConfigError, EmptyRunError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
