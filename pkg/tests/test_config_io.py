import json
import math
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebcm.config import dump_config, load_config, parse_config
from ebcm.errors import ConfigError
from ebcm.io import CSV_COLUMNS, read_results_csv, results_csv, write_results
from ebcm.model import Geometry
from ebcm.runner import ExperimentConfig, run_experiment
from ebcm.scheduler import AlternatingBlocks, RandomPerPhoton
from ebcm.stats import compare_table

FIG1 = """\
# two-slit baseline
d = 3350nm
a = 670nm
lambda = 670nm
X = 0.05mm
gamma = 0.999
M = 1000000
mode = random
"""


def with_line(text, line):
    """Replace the line setting the same key, or append it."""
    key = line.split()[0]
    lines = text.splitlines()
    if any(ln.startswith(key + " =") for ln in lines):
        lines = [line if ln.startswith(key + " =") else ln for ln in lines]
    else:
        lines.append(line)
    return "\n".join(lines) + "\n"


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadConfig:
    def test_baseline_setup(self, tmp_path):
        cfg = load_config(write(tmp_path, FIG1))
        assert cfg == ExperimentConfig()
        assert cfg.geometry.d == 5.0 and cfg.geometry.a == 1.0
        assert cfg.geometry.X == pytest.approx(74.6268656716418, rel=1e-15)

    def test_alternating(self, tmp_path):
        text = FIG1.replace("mode = random", "mode = alternating\nN = 500000")
        cfg = load_config(write(tmp_path, text))
        assert cfg.mode == AlternatingBlocks(500_000)
        assert cfg.M == 1_000_000

    def test_gamma_out_of_range(self, tmp_path):
        with pytest.raises(ConfigError) as exc:
            load_config(write(tmp_path, FIG1.replace("0.999", "1.2")))
        assert exc.value.key == "gamma"
        assert "(0, 1)" in str(exc.value)

    @pytest.mark.parametrize("key", ["d", "a", "lambda", "X", "gamma", "M", "mode"])
    def test_missing_key(self, tmp_path, key):
        lines = [ln for ln in FIG1.splitlines() if not ln.startswith(f"{key} =")]
        with pytest.raises(ConfigError) as exc:
            load_config(write(tmp_path, "\n".join(lines)))
        assert exc.value.key == key
        assert repr(key) in str(exc.value)

    def test_alternating_needs_n(self, tmp_path):
        with pytest.raises(ConfigError) as exc:
            load_config(write(tmp_path, FIG1.replace("mode = random", "mode = alternating")))
        assert exc.value.key == "N"

    @pytest.mark.parametrize(
        "line,key",
        [("d = 3.35um", None), ("d = 5lambda", None), ("d = 3350", None),
         ("d = 3350 furlongs", "d"), ("M = 1.5", "M"), ("mode = sometimes", "mode"),
         ("colour = blue", "colour"), ("threshold = 0", "threshold")],
    )
    def test_value_parsing(self, tmp_path, line, key):
        path = write(tmp_path, with_line(FIG1, line))
        if key is None:
            assert load_config(path).geometry.d == pytest.approx(5.0)
        else:
            with pytest.raises(ConfigError) as exc:
                load_config(path)
            assert exc.value.key == key

    def test_optional_fields(self, tmp_path):
        extra = "threshold = 0.3\nseed = 18446744073709551615\nreplicas = 3\nn_pixels = 91\n" \
                "theta_min = -45\ntheta_max = 0.5rad\n"
        cfg = load_config(write(tmp_path, FIG1 + extra))
        assert cfg.threshold == 0.3 and cfg.seed == 2**64 - 1 and cfg.replicas == 3
        assert cfg.geometry.n_pixels == 91
        assert cfg.geometry.theta_min == pytest.approx(-math.pi / 4)
        assert cfg.geometry.theta_max == 0.5


configs = st.builds(
    ExperimentConfig,
    geometry=st.builds(
        Geometry,
        d=st.floats(1.5, 20.0),
        a=st.floats(0.1, 1.0),
        X=st.floats(30.0, 1e4),
        n_pixels=st.integers(3, 500),
        wavelength_nm=st.floats(100.0, 2000.0),
    ),
    mode=st.one_of(st.just(RandomPerPhoton()), st.builds(AlternatingBlocks, st.integers(1, 1000))),
    M=st.integers(1000, 10**7),
    gamma=st.floats(1e-6, 1 - 1e-6),
    threshold=st.floats(1e-6, 1 - 1e-6),
    seed=st.integers(0, 2**64 - 1),
    replicas=st.integers(1, 8),
)


@settings(max_examples=200)
@given(configs)
def test_dump_load_round_trip(cfg):
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "echo.cfg"
        path.write_text(dump_config(cfg))
        assert load_config(path) == cfg


def small_table(**kw):
    return run_experiment(ExperimentConfig(M=50_000, gamma=0.99, seed=5, **kw))


class TestWriteResults:
    def test_layout(self, tmp_path):
        table = small_table()
        csv_path, json_path = write_results(table, compare_table(table), tmp_path / "r.csv")
        raw = csv_path.read_bytes()
        assert raw.endswith(b"\n") and b"\r" not in raw
        lines = raw.decode().splitlines()
        assert len(lines) == 182
        assert lines[0] == ",".join(CSV_COLUMNS)
        first = lines[1].split(",")
        assert first[0] == "0" and float(first[1]) == pytest.approx(-90 + 90 / 181)
        sidecar = json.loads(json_path.read_text())
        assert json_path.read_bytes().endswith(b"\n")
        assert sidecar["empty_run"] is False
        assert sidecar["report"]["n_pixels_used"] == 181
        assert sidecar["run"]["arrivals_total"] + sidecar["run"]["discarded"] == 50_000
        assert sidecar["manifest"]["outputs"]["csv"] == str(csv_path)

    def test_reals_round_trip(self, tmp_path):
        table = small_table()
        write_results(table, None, tmp_path / "r.csv")
        data = read_results_csv(tmp_path / "r.csv")
        np.testing.assert_array_equal(data["normalized_clicks"], table.normalized_clicks)
        np.testing.assert_array_equal(data["analytic_two_slit"], table.analytic_two_slit)
        np.testing.assert_array_equal(data["theta_deg"], table.theta_deg)
        np.testing.assert_array_equal(data["clicks"], table.clicks)

    def test_empty_run(self, tmp_path):
        table = small_table(threshold=0.999999)
        _, json_path = write_results(table, compare_table(table), tmp_path / "e.csv")
        data = read_results_csv(tmp_path / "e.csv")
        assert data["clicks"].size == 181 and not data["clicks"].any()
        sidecar = json.loads(json_path.read_text())
        assert sidecar["empty_run"] is True and sidecar["report"] is None

    def test_identical_bytes(self, tmp_path):
        cfg = ExperimentConfig(M=50_000, mode=AlternatingBlocks(300), seed=77)
        a, _ = write_results(run_experiment(cfg), None, tmp_path / "a.csv")
        b, _ = write_results(run_experiment(cfg), None, tmp_path / "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_sidecar_reloads_config(self, tmp_path):
        table = small_table(mode=AlternatingBlocks(17))
        _, json_path = write_results(table, None, tmp_path / "r.csv")
        assert load_config(json_path) == table.config

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            write_results(small_table(), None, tmp_path / "missing" / "r.csv")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_results_csv(path)


def test_csv_text_is_pure_function_of_counts():
    table = small_table()
    again = replace(table, wall_time=123.0, started_at="yesterday")
    assert results_csv(table) == results_csv(again)


def test_parse_config_accepts_mapping():
    values = dict(d="5lambda", a="1lambda", X="100lambda", gamma="0.5", M="10", mode="random")
    values["lambda"] = "500nm"
    cfg = parse_config(values)
    assert cfg.geometry.wavelength_nm == 500.0 and cfg.geometry.X == 100.0
