from argparse import ArgumentTypeError

import pytest

from qfridge.src.config import OUT_ENV, Config, ExperimentConfig
from qfridge.src.model import RefrigeratorParams
from qfridge.src.mpemba import OptimizerConfig
from qfridge.src.types import (
    AxisSpec,
    ConfigError,
    ExperimentKind,
    Observable,
    Scale,
    SweepAxis,
    UnitaryFamily,
)
from qfridge.src.utils import parse_axis, parse_family


@pytest.fixture(autouse=True)
def no_out_env(monkeypatch):
    monkeypatch.delenv(OUT_ENV, raising=False)


def test_defaults():
    config = ExperimentConfig.from_values(ExperimentKind.SPECTRUM, {})
    assert config.params == RefrigeratorParams()
    assert config.optimizer == OptimizerConfig()
    assert config.families == (UnitaryFamily.GLOBAL,)
    assert config.observable is Observable.DISTANCE
    assert config.epsilon == 1e-5
    assert config.out == "."


def test_kappa_ties_all_couplings():
    config = ExperimentConfig.from_values(
        ExperimentKind.EVOLVE, {"kappa": 2e-4, "kappa_c": 5e-5}
    )
    p = config.params
    assert p.kappa_c == p.kappa_h == p.kappa_w == 2e-4


def test_no_cold_bath():
    config = ExperimentConfig.from_values(
        ExperimentKind.EVOLVE, {"kappa": 2e-4, "no_cold_bath": True}
    )
    assert config.params.kappa_c == 0
    assert config.params.kappa_h == 2e-4


def test_out_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(OUT_ENV, str(tmp_path))
    config = ExperimentConfig.from_values(ExperimentKind.SPECTRUM, {})
    assert config.out_path == tmp_path
    config = ExperimentConfig.from_values(ExperimentKind.SPECTRUM, {"out": "elsewhere"})
    assert config.out == "elsewhere"


def test_duplicate_families_collapse():
    families = [UnitaryFamily.LOCAL_BOTH, UnitaryFamily.GLOBAL, UnitaryFamily.LOCAL_BOTH]
    config = ExperimentConfig.from_values(ExperimentKind.MPEMBA, {"families": families})
    assert config.families == (UnitaryFamily.LOCAL_BOTH, UnitaryFamily.GLOBAL)


@pytest.mark.parametrize(
    "values",
    [
        {"epsilon": 0.0},
        {"g": 0.9},
        {"Tc": -1.0},
        {"starts": 0},
        {"grid_points": 1},
        {"grid_lo": 5.0, "grid_hi": 1.0},
        {
            "axis1": AxisSpec(SweepAxis.KAPPA, 1e-5, 1e-3, 3),
            "axis2": AxisSpec(SweepAxis.KAPPA_HW, 1e-5, 1e-3, 3),
        },
        {"axis1": AxisSpec(SweepAxis.G, 0.0, 0.1, 3, Scale.LOG)},
    ],
    ids=[
        "epsilon",
        "coupling",
        "temperature",
        "starts",
        "grid-points",
        "grid-range",
        "shared-axis",
        "log-axis",
    ],
)
def test_invalid_values(values):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_values(ExperimentKind.TIMING_SWEEP, values)


def test_encode_decode():
    config = ExperimentConfig.from_values(
        ExperimentKind.TIMING_SWEEP,
        {
            "g": 0.05,
            "families": [UnitaryFamily.LOCAL_QUTRIT],
            "axis1": AxisSpec(SweepAxis.G, 0.001, 0.2, 4, Scale.LINEAR),
            "axis2": AxisSpec(SweepAxis.KAPPA, 1e-5, 1e-3, 6),
        },
    )
    assert ExperimentConfig.decode_json(config.encode("json")) == config
    assert ExperimentConfig.decode_yaml(config.encode("yaml")) == config


def test_load_yaml(tmp_path):
    fp = tmp_path / "run.yaml"
    fp.write_text(
        "schema_version: 1\n"
        "E0: 0.8\n"
        "kappa: 0.0002\n"
        "families: [local_both, global]\n"
        "axis1: {name: g, start: 0.001, stop: 0.2, num: 4, scale: linear}\n"
    )
    config = Config.load(fp)
    assert config.E0 == 0.8
    assert config.families == [UnitaryFamily.LOCAL_BOTH, UnitaryFamily.GLOBAL]
    assert config.axis1 == AxisSpec(SweepAxis.G, 0.001, 0.2, 4, Scale.LINEAR)
    assert config.axis1.values().tolist() == pytest.approx([0.001, 0.0673, 0.1337, 0.2], abs=1e-4)


def test_load_json(tmp_path):
    fp = tmp_path / "run.json"
    fp.write_text('{"Th": 4.0, "observable": "temperature"}')
    config = Config.load(fp)
    assert config.Th == 4.0
    assert config.observable is Observable.TEMPERATURE


@pytest.mark.parametrize(
    "text",
    ["E0: 0.8\nunknown: 1\n", "schema_version: 2\n", "E0: [1, 2]\n", "E0: 0.8\n  bad"],
    ids=["unknown-field", "schema", "type", "syntax"],
)
def test_load_rejects(tmp_path, text):
    fp = tmp_path / "run.yaml"
    fp.write_text(text)
    with pytest.raises(ConfigError):
        Config.load(fp)


def test_load_missing(tmp_path):
    with pytest.raises(ConfigError):
        Config.load(tmp_path / "absent.yaml")


def test_parse_axis():
    assert parse_axis("kappa:1e-5:1e-3:6") == AxisSpec(SweepAxis.KAPPA, 1e-5, 1e-3, 6, Scale.LOG)
    assert parse_axis("g:0.001:0.2:4").scale is Scale.LINEAR
    assert parse_axis("KAPPA_HW:1e-5:1e-2:25:linear").scale is Scale.LINEAR
    for bad in ("kappa:1e-5:1e-3", "beta:1:2:3", "kappa:0:1e-3:4:log", "g:0:1:0"):
        with pytest.raises(ArgumentTypeError):
            parse_axis(bad)


def test_parse_family():
    assert parse_family("Local-Qubit") is UnitaryFamily.LOCAL_QUBIT
    with pytest.raises(ArgumentTypeError):
        parse_family("partial")


def test_example_config():
    from pathlib import Path

    config = Config.load(Path(__file__).parents[1] / "example.yaml")
    assert config.families == [UnitaryFamily.GLOBAL, UnitaryFamily.LOCAL_BOTH]
    assert config.axis2 == AxisSpec(SweepAxis.KAPPA, 1e-5, 1e-3, 6, Scale.LOG)
