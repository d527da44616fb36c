"""Flat ``key = value`` experiment configs.

Schema (keys are case-sensitive)::

    d, a, X        length; suffix nm, um, mm or lambda (multiples of the
                   wavelength); a bare number means nm
    lambda         wavelength; nm, um or mm (bare number means nm)
    mode           random | alternating
    N              block size, required when mode = alternating
    M              total photons
    gamma          detector memory, in (0, 1)
    threshold      click threshold on |p|, in (0, 1); default 0.25
    seed           unsigned 64-bit integer; default 0
    replicas       default 1
    n_pixels       default 181
    theta_min,     detector arc in degrees (suffix deg or rad allowed);
    theta_max      default -90 / 90

Lines starting with ``#`` or ``;`` are comments.  ``dump_config`` writes
the same format with lengths in wavelengths, so a dumped config reloads to
an identical ``ExperimentConfig``.
"""
from __future__ import annotations

import configparser
import json
import math
import re
from pathlib import Path
from typing import Mapping

from .errors import ConfigError
from .model import Geometry
from .runner import ExperimentConfig
from .scheduler import AlternatingBlocks, RandomPerPhoton

REQUIRED = ("d", "a", "lambda", "X", "mode", "M", "gamma")
KNOWN = set(REQUIRED) | {"N", "threshold", "seed", "replicas", "n_pixels", "theta_min", "theta_max"}

_NUMBER_UNIT = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-zµ]*)\s*$")
_TO_NM = {"": 1.0, "nm": 1.0, "um": 1e3, "µm": 1e3, "mm": 1e6}


def _split(key: str, raw: str) -> tuple[float, str]:
    m = _NUMBER_UNIT.match(str(raw))
    if not m:
        raise ConfigError(f"{key}: cannot parse {raw!r} as a number", key=key)
    return float(m.group(1)), m.group(2)


def _wavelength_nm(raw: str) -> float:
    value, unit = _split("lambda", raw)
    if unit not in _TO_NM:
        raise ConfigError(f"lambda: unknown unit {unit!r}", key="lambda")
    return value * _TO_NM[unit]


def _length(key: str, raw: str, wavelength_nm: float) -> float:
    """Length in wavelengths."""
    value, unit = _split(key, raw)
    if unit == "lambda":
        return value
    if unit not in _TO_NM:
        raise ConfigError(f"{key}: unknown unit {unit!r}", key=key)
    return value * _TO_NM[unit] / wavelength_nm


def _angle(key: str, raw: str) -> float:
    value, unit = _split(key, raw)
    if unit in ("", "deg"):
        return math.radians(value)
    if unit == "rad":
        return value
    raise ConfigError(f"{key}: unknown angle unit {unit!r}", key=key)


def _integer(key: str, raw: str) -> int:
    text = str(raw).strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}", key=key) from None
    if not value.is_integer():
        raise ConfigError(f"{key}: expected an integer, got {raw!r}", key=key)
    return int(value)


def _real(key: str, raw: str) -> float:
    try:
        return float(str(raw).strip())
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}", key=key) from None


def parse_config(values: Mapping[str, str]) -> ExperimentConfig:
    unknown = sorted(set(values) - KNOWN)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}", key=unknown[0])
    for key in REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required config key {key!r}", key=key)

    wl = _wavelength_nm(values["lambda"])
    if not wl > 0:
        raise ConfigError(f"lambda must be > 0, got {values['lambda']!r}", key="lambda")
    geom_kw = {}
    if "n_pixels" in values:
        geom_kw["n_pixels"] = _integer("n_pixels", values["n_pixels"])
    for key in ("theta_min", "theta_max"):
        if key in values:
            geom_kw[key] = _angle(key, values[key])
    geometry = Geometry(
        d=_length("d", values["d"], wl),
        a=_length("a", values["a"], wl),
        X=_length("X", values["X"], wl),
        wavelength_nm=wl,
        **geom_kw,
    )

    mode_name = str(values["mode"]).strip().lower()
    if mode_name == "random":
        mode = RandomPerPhoton()
    elif mode_name == "alternating":
        if "N" not in values:
            raise ConfigError("missing required config key 'N' for mode = alternating", key="N")
        mode = AlternatingBlocks(_integer("N", values["N"]))
    else:
        raise ConfigError(f"mode must be 'random' or 'alternating', got {mode_name!r}", key="mode")

    kw = {}
    if "threshold" in values:
        kw["threshold"] = _real("threshold", values["threshold"])
    for key in ("seed", "replicas"):
        if key in values:
            kw[key] = _integer(key, values[key])
    return ExperimentConfig(
        geometry=geometry,
        mode=mode,
        M=_integer("M", values["M"]),
        gamma=_real("gamma", values["gamma"]),
        **kw,
    )


def load_config(path) -> ExperimentConfig:
    """Read a config file, or the config echo inside a JSON results sidecar."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        data = json.loads(text)
        values = data.get("manifest", {}).get("config", data)
        return parse_config({k: str(v) for k, v in values.items()})

    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[config]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(dict(parser["config"]))


def config_echo(config: ExperimentConfig) -> dict[str, str]:
    g = config.geometry
    echo = {
        "d": f"{g.d!r}lambda",
        "a": f"{g.a!r}lambda",
        "lambda": f"{g.wavelength_nm!r}nm",
        "X": f"{g.X!r}lambda",
        "n_pixels": str(g.n_pixels),
        "theta_min": f"{g.theta_min!r}rad",
        "theta_max": f"{g.theta_max!r}rad",
    }
    if isinstance(config.mode, AlternatingBlocks):
        echo["mode"] = "alternating"
        echo["N"] = str(config.mode.n)
    else:
        echo["mode"] = "random"
    echo.update(
        M=str(config.M),
        gamma=repr(config.gamma),
        threshold=repr(config.threshold),
        seed=str(config.seed),
        replicas=str(config.replicas),
    )
    return echo


def dump_config(config: ExperimentConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in config_echo(config).items())
