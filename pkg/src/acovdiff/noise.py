"""Stationary error processes with known autocovariances.

Two families are supported:

* ``MA1Dependent``: ``eps_i = r0 * delta_i + r1 * delta_{i-1}`` with i.i.d.
  Gaussian or Student-t(4) innovations, parameterised by the lag-one
  autocorrelation ``gamma1``.
* ``AR1``: ``eps_i = phi * eps_{i-1} + zeta_i`` with Gaussian ``zeta``, started
  from its stationary law so no burn-in is needed.

Random streams are keyed by ``(seed, stream, replication, role)`` through
:class:`numpy.random.SeedSequence`, so any replication can be regenerated on its
own, in any order, in any process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.signal import lfilter

INNOVATIONS = ("gaussian", "t4")
# Var(t_nu) = nu / (nu - 2)
_INNOVATION_VARIANCE = {"gaussian": 1.0, "t4": 2.0}

ROLE_NOISE = 0


def ma_coefficients(gamma1: float) -> tuple[float, float]:
    """Return ``(r0, r1)`` with ``r0**2 + r1**2 = 1`` and ``r0 * r1 = gamma1``."""
    if not -0.5 <= gamma1 <= 0.5:
        raise ValueError(f"gamma1 must lie in [-1/2, 1/2], got {gamma1}")
    a = math.sqrt(1.0 + 2.0 * gamma1)
    b = math.sqrt(1.0 - 2.0 * gamma1)
    return (a + b) / 2.0, (a - b) / 2.0


@dataclass(frozen=True)
class MA1Dependent:
    gamma1: float
    innovation: str = "gaussian"

    def __post_init__(self):
        if not -0.5 <= self.gamma1 <= 0.5:
            raise ValueError(f"gamma1 must lie in [-1/2, 1/2], got {self.gamma1}")
        if self.innovation not in INNOVATIONS:
            raise ValueError(
                f"unknown innovation {self.innovation!r}; choose from {list(INNOVATIONS)}"
            )

    @property
    def dependence(self) -> int:
        return 1

    def to_dict(self) -> dict:
        return {"model": "ma1", "gamma1": self.gamma1, "innovation": self.innovation}


@dataclass(frozen=True)
class AR1:
    phi: float

    def __post_init__(self):
        if not abs(self.phi) < 1.0:
            raise ValueError(f"AR(1) coefficient must satisfy |phi| < 1, got {self.phi}")

    @property
    def dependence(self) -> float:
        return math.inf

    def to_dict(self) -> dict:
        return {"model": "ar1", "phi": self.phi}


ErrorModel = Union[MA1Dependent, AR1]


def error_model_from_dict(d: dict) -> ErrorModel:
    kind = d.get("model")
    if kind == "ma1":
        return MA1Dependent(float(d.get("gamma1", 0.0)), d.get("innovation", "gaussian"))
    if kind == "ar1":
        return AR1(float(d["phi"]))
    raise ValueError(f"unknown error model {kind!r}; choose from ['ar1', 'ma1']")


def make_rng(seed: int, replication: int = 0, stream: int = 0, role: int = ROLE_NOISE):
    """Independent generator for one (stream, replication, role) under a master seed."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream, replication, role))
    return np.random.Generator(np.random.PCG64(ss))


def _innovations(rng: np.random.Generator, kind: str, size: int) -> np.ndarray:
    if kind == "gaussian":
        return rng.standard_normal(size)
    return rng.standard_t(4, size)


def generate(model: ErrorModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` consecutive values of the error process."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if isinstance(model, MA1Dependent):
        r0, r1 = ma_coefficients(model.gamma1)
        delta = _innovations(rng, model.innovation, n + 1)
        return r0 * delta[1:] + r1 * delta[:-1]
    if isinstance(model, AR1):
        phi = model.phi
        z = rng.standard_normal(n + 1)
        eps0 = z[0] / math.sqrt(1.0 - phi * phi)
        out, _ = lfilter([1.0], [1.0, -phi], z[1:], zi=[phi * eps0])
        return out
    raise TypeError(f"not an error model: {model!r}")


def true_acf(model: ErrorModel, maxlag: int) -> np.ndarray:
    """Autocovariances ``gamma_0..gamma_maxlag`` of the process."""
    if maxlag < 0:
        raise ValueError("maxlag must be nonnegative")
    out = np.zeros(maxlag + 1)
    if isinstance(model, MA1Dependent):
        scale = _INNOVATION_VARIANCE[model.innovation]
        out[0] = scale
        if maxlag >= 1:
            out[1] = scale * model.gamma1
        return out
    if isinstance(model, AR1):
        return model.phi ** np.arange(maxlag + 1) / (1.0 - model.phi**2)
    raise TypeError(f"not an error model: {model!r}")


def true_acr(model: ErrorModel, maxlag: int) -> np.ndarray:
    """Autocorrelations ``rho_0..rho_maxlag``."""
    g = true_acf(model, maxlag)
    return g / g[0]


def describe(model: ErrorModel) -> str:
    if isinstance(model, MA1Dependent):
        return f"ma1(gamma1={model.gamma1:g},{model.innovation})"
    return f"ar1(phi={model.phi:g})"
