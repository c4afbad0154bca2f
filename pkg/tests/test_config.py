import pytest
import yaml

from acovdiff.config import (
    ConfigError,
    bundled_scenario,
    dump_spec,
    load_spec,
    signal_from_config,
    spec_from_dict,
)
from acovdiff.montecarlo import EstimatorConfig, ExperimentSpec
from acovdiff.noise import AR1, MA1Dependent
from acovdiff.signal import StepSignal, constant_signal, quadratic_variation, simulation_signal


def test_round_trip(tmp_path):
    spec = ExperimentSpec(
        StepSignal([1, -2, 3], [0, 0.2, 0.7, 1]), "f3", AR1(0.35), 900, 17, 5,
        estimators=(EstimatorConfig("difference", 2, 0.5, -0.5), EstimatorConfig("hvk", 2)),
        target_lags=(1, 2), stream=4, name="rt",
    )
    p = tmp_path / "s.yaml"
    p.write_text(dump_spec(spec))
    assert load_spec(p) == spec


def test_named_signals():
    assert signal_from_config("simulation") == simulation_signal()
    assert signal_from_config("none") == constant_signal()
    with pytest.raises(ConfigError, match="simulation"):
        signal_from_config("zigzag")
    with pytest.raises(ConfigError):
        signal_from_config(3)


def test_defaults_and_errors():
    s = spec_from_dict({"n": 100})
    assert s.noise == MA1Dependent(0.0) and s.estimators == (EstimatorConfig(),)
    for bad in ({}, {"n": 100, "noise": {"model": "ma1", "gamma1": 0.9}}, {"n": "many"}):
        with pytest.raises(ConfigError):
            spec_from_dict(bad)


def test_load_rejects_non_mapping(tmp_path):
    p = tmp_path / "x.yaml"
    p.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_spec(p)


def test_bundled_scenario():
    s = bundled_scenario()
    assert s.step == simulation_signal()
    assert quadratic_variation(s.step) == 204
    assert (s.n, s.replications, s.smooth) == (1600, 500, "f1")
    assert s.noise == MA1Dependent(0.2)
    # the printed literal breakpoints are documented next to the chosen ones
    from importlib import resources

    text = resources.files("acovdiff.scenarios").joinpath("simulation.yaml").read_text()
    assert "3/36" in text
    assert yaml.safe_load(text)["signal"]["levels"] == [0, 10, 0, 1, 0, 1, 0]
