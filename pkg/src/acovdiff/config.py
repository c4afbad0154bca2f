"""YAML experiment configs.

A config looks like::

    name: t1_f1
    n: 1600
    replications: 500
    seed: 42
    signal: simulation          # or {levels: [...], breakpoints: [...]} or "none"
    smooth: f1
    noise: {model: ma1, gamma1: -0.5, innovation: gaussian}
    estimators:
      - {method: difference, m: 2, scheme: [1, -1]}
      - {method: hvk, maxlag: 2}
    target_lags: [1, 2]
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import yaml

from .montecarlo import EstimatorConfig, ExperimentSpec
from .noise import error_model_from_dict
from .signal import StepSignal, constant_signal, simulation_signal

NAMED_SIGNALS = {"simulation": simulation_signal, "none": constant_signal}


class ConfigError(ValueError):
    pass


def signal_from_config(value) -> StepSignal:
    if isinstance(value, str):
        try:
            return NAMED_SIGNALS[value]()
        except KeyError:
            raise ConfigError(
                f"unknown signal {value!r}; choose from {sorted(NAMED_SIGNALS)} or give levels/breakpoints"
            ) from None
    if isinstance(value, dict):
        return StepSignal.from_dict(value)
    raise ConfigError(f"cannot interpret signal entry {value!r}")


def estimator_from_config(d: dict) -> EstimatorConfig:
    method = d.get("method", "difference")
    if method == "hvk":
        return EstimatorConfig("hvk", int(d.get("maxlag", 2)))
    d0, d1 = d.get("scheme", [1.0, -1.0])
    return EstimatorConfig("difference", int(d.get("m", 1)), float(d0), float(d1))


def spec_from_dict(d: dict) -> ExperimentSpec:
    try:
        return ExperimentSpec(
            step=signal_from_config(d.get("signal", "simulation")),
            smooth=d.get("smooth", "zero"),
            noise=error_model_from_dict(d.get("noise", {"model": "ma1", "gamma1": 0.0})),
            n=int(d["n"]),
            replications=int(d.get("replications", 500)),
            seed=int(d.get("seed", 0)),
            estimators=tuple(estimator_from_config(e) for e in d.get("estimators", [{}])),
            target_lags=tuple(int(h) for h in d.get("target_lags", [1, 2])),
            stream=int(d.get("stream", 0)),
            name=str(d.get("name", "experiment")),
        )
    except KeyError as exc:
        raise ConfigError(f"missing required config key {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def spec_to_dict(spec: ExperimentSpec) -> dict:
    return {
        "name": spec.name,
        "n": spec.n,
        "replications": spec.replications,
        "seed": spec.seed,
        "stream": spec.stream,
        "signal": spec.step.to_dict(),
        "smooth": spec.smooth,
        "noise": spec.noise.to_dict(),
        "estimators": [e.to_dict() for e in spec.estimators],
        "target_lags": list(spec.target_lags),
    }


def load_spec(path: str | Path) -> ExperimentSpec:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return spec_from_dict(data)


def dump_spec(spec: ExperimentSpec) -> str:
    return yaml.safe_dump(spec_to_dict(spec), sort_keys=False)


def bundled_scenario(name: str = "simulation") -> ExperimentSpec:
    text = resources.files("acovdiff.scenarios").joinpath(f"{name}.yaml").read_text()
    return spec_from_dict(yaml.safe_load(text))
