"""Replication engine for MSE studies.

Every replication draws its noise from a generator keyed by
``(seed, spec.stream, replication)``, so results do not depend on how
replications are split across worker processes; the reduction is an ordered
concatenation followed by vectorised moments.
"""

from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import noise as noise_mod
from .estimators import AcfEstimate, estimate_acf, estimate_acf_hvk
from .signal import (
    StepSignal,
    evaluate_mean,
    get_smooth,
    quadratic_variation,
    total_variation,
)
from .theory import predict_gamma0

log = logging.getLogger(__name__)

MAX_FAILURE_FRACTION = 0.01


class ExperimentError(RuntimeError):
    """Too many replications failed, or the experiment could not run."""


@dataclass(frozen=True)
class EstimatorConfig:
    """One estimator to apply per replication.

    ``method="difference"`` uses ``m`` as the dependence depth and ``(d0, d1)``
    as the lag-0 scheme; ``method="hvk"`` uses ``m`` as the largest lag.
    """

    method: str = "difference"
    m: int = 1
    d0: float = 1.0
    d1: float = -1.0

    def __post_init__(self):
        if self.method not in ("difference", "hvk"):
            raise ValueError(f"unknown method {self.method!r}; choose 'difference' or 'hvk'")
        if self.m < 0:
            raise ValueError("m must be nonnegative")

    @property
    def label(self) -> str:
        if self.method == "hvk":
            return "hvk"
        base = f"diff_m{self.m}"
        if (self.d0, self.d1) != (1.0, -1.0):
            base += f"_d({self.d0:g},{self.d1:g})"
        return base

    def apply(self, y: np.ndarray) -> AcfEstimate:
        if self.method == "hvk":
            return estimate_acf_hvk(y, self.m)
        return estimate_acf(y, self.m, self.d0, self.d1)

    def to_dict(self) -> dict:
        d = {"method": self.method}
        if self.method == "hvk":
            d["maxlag"] = self.m
        else:
            d.update(m=self.m, scheme=[self.d0, self.d1])
        return d


@dataclass(frozen=True)
class ExperimentSpec:
    step: StepSignal
    smooth: str
    noise: noise_mod.ErrorModel
    n: int
    replications: int
    seed: int
    estimators: tuple[EstimatorConfig, ...] = (EstimatorConfig(),)
    target_lags: tuple[int, ...] = (1, 2)
    stream: int = 0
    name: str = "experiment"

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.estimators:
            raise ValueError("at least one estimator is required")
        get_smooth(self.smooth)
        labels = [e.label for e in self.estimators]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate estimator configurations: {labels}")
        for e in self.estimators:
            if e.method == "difference" and self.n <= e.m + 1:
                raise ValueError(f"n = {self.n} too small for m = {e.m}")

    def mean(self) -> np.ndarray:
        return evaluate_mean(self.step, get_smooth(self.smooth), self.n)

    def with_(self, **kw) -> "ExperimentSpec":
        return replace(self, **kw)


@dataclass
class CellStats:
    """Moments of one estimator at one lag over the successful replications."""

    estimator: str
    quantity: str  # "rho" or "gamma"
    lag: int
    truth: float
    mean: float
    bias: float
    variance: float
    mse: float
    mse_se: float
    replications: int

    def as_row(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class MseReport:
    spec: ExperimentSpec
    cells: list[CellStats]
    failures: dict[str, int]
    estimates: dict[str, np.ndarray] = field(repr=False, default_factory=dict)
    predictions: dict[str, dict] = field(default_factory=dict)

    def cell(self, estimator: str, lag: int, quantity: str = "rho") -> CellStats:
        for c in self.cells:
            if c.estimator == estimator and c.lag == lag and c.quantity == quantity:
                return c
        raise KeyError((estimator, quantity, lag))

    def mse(self, estimator: str, lag: int, quantity: str = "rho") -> float:
        return self.cell(estimator, lag, quantity).mse

    def rows(self) -> list[dict]:
        out = []
        for c in self.cells:
            row = {"experiment": self.spec.name, "n": self.spec.n, **c.as_row()}
            row["failures"] = self.failures.get(c.estimator, 0)
            out.append(row)
        return out


def _replicate(spec: ExperimentSpec, mean: np.ndarray, r: int) -> list[np.ndarray | None]:
    rng = noise_mod.make_rng(spec.seed, r, stream=spec.stream)
    y = mean + noise_mod.generate(spec.noise, spec.n, rng)
    out = []
    for est in spec.estimators:
        try:
            a = est.apply(y)
        except (ValueError, FloatingPointError) as exc:
            log.debug("replication %d failed for %s: %s", r, est.label, exc)
            out.append(None)
            continue
        out.append(a.gamma if a.ok else None)
    return out


def _run_chunk(spec: ExperimentSpec, start: int, stop: int) -> list[list[np.ndarray | None]]:
    mean = spec.mean()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return [_replicate(spec, mean, r) for r in range(start, stop)]


def default_workers() -> int:
    env = os.environ.get("ACOVDIFF_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer ACOVDIFF_WORKERS=%r", env)
    return 1


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    edges = np.linspace(0, total, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges, edges[1:]) if b > a]


def simulate_replications(spec: ExperimentSpec, workers: int | None = None):
    """Per-replication gamma estimates, in replication order."""
    workers = default_workers() if workers is None else workers
    if workers <= 1:
        return _run_chunk(spec, 0, spec.replications)
    # several chunks per worker keeps the pool busy when chunks differ in cost
    bounds = _chunks(spec.replications, 4 * workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [spec] * len(bounds), *zip(*bounds))
        out = []
        for p in parts:
            out.extend(p)
    return out


def _stats(label, quantity, lag, truth, values) -> CellStats:
    err = values - truth
    r = err.size
    sq = err * err
    bias = float(np.mean(err))
    return CellStats(
        estimator=label,
        quantity=quantity,
        lag=lag,
        truth=float(truth),
        mean=float(np.mean(values)),
        bias=bias,
        variance=float(np.mean((err - bias) ** 2)),
        mse=float(np.mean(sq)),
        mse_se=float(np.std(sq, ddof=1) / math.sqrt(r)) if r > 1 else math.nan,
        replications=r,
    )


def _predictions(spec: ExperimentSpec) -> dict[str, dict]:
    jk = quadratic_variation(spec.step)
    jtv = total_variation(spec.step)
    gamma0 = float(noise_mod.true_acf(spec.noise, 0)[0])
    out = {}
    for est in spec.estimators:
        if est.method != "difference":
            continue
        p = predict_gamma0(gamma0, est.m, spec.n, jk, jtv)
        out[est.label] = {
            "gamma0_mean": p.expected_value,
            "gamma0_variance": p.variance,
            **{f"term_{k}": v for k, v in p.leading_terms.items()},
        }
    return out


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> MseReport:
    """Run all replications of ``spec`` and aggregate the MSE of every estimator."""
    raw = simulate_replications(spec, workers)
    max_lag = max(max(spec.target_lags, default=0), max(e.m for e in spec.estimators))
    acf = noise_mod.true_acf(spec.noise, max_lag)
    rho_true = acf / acf[0]

    cells: list[CellStats] = []
    failures: dict[str, int] = {}
    estimates: dict[str, np.ndarray] = {}
    for k, est in enumerate(spec.estimators):
        ok = [rep[k] for rep in raw if rep[k] is not None]
        failed = spec.replications - len(ok)
        failures[est.label] = failed
        if failed > MAX_FAILURE_FRACTION * spec.replications:
            raise ExperimentError(
                f"{spec.name}: {failed} of {spec.replications} replications failed for {est.label}"
            )
        if failed:
            log.warning("%s: excluded %d failed replications for %s", spec.name, failed, est.label)
        g = np.vstack(ok)
        estimates[est.label] = g
        for h in range(est.m + 1):
            cells.append(_stats(est.label, "gamma", h, acf[h], g[:, h]))
        rho = g / g[:, :1]
        for h in spec.target_lags:
            if h <= est.m:
                cells.append(_stats(est.label, "rho", h, rho_true[h], rho[:, h]))
    return MseReport(
        spec=spec,
        cells=cells,
        failures=failures,
        estimates=estimates,
        predictions=_predictions(spec),
    )


@dataclass
class RateReport:
    n_grid: tuple[int, ...]
    reports: list[MseReport]
    slopes: dict[tuple[str, str, int], float]
    scaled_mse: dict[tuple[str, str, int], list[float]]

    def scaled_ratio(self, key) -> float:
        v = self.scaled_mse[key]
        return max(v) / min(v)

    def rows(self) -> list[dict]:
        out = []
        for key, slope in self.slopes.items():
            est, q, lag = key
            out.append(
                {
                    "estimator": est,
                    "quantity": q,
                    "lag": lag,
                    "slope": slope,
                    "n_times_mse": " ".join(f"{v:.6g}" for v in self.scaled_mse[key]),
                    "ratio": self.scaled_ratio(key),
                }
            )
        return out


def run_rate_study(
    base: ExperimentSpec, n_grid: Sequence[int], workers: int | None = None
) -> RateReport:
    """Run ``base`` at each sample size and fit ``log MSE = a + b log n`` per cell."""
    n_grid = tuple(int(n) for n in n_grid)
    if len(n_grid) < 3:
        raise ValueError("a rate study needs at least three sample sizes")
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError(f"sample sizes must increase: {n_grid}")
    reports = [run_experiment(base.with_(n=n, name=f"{base.name}_n{n}"), workers) for n in n_grid]
    keys = [(c.estimator, c.quantity, c.lag) for c in reports[0].cells]
    slopes, scaled = {}, {}
    logn = np.log(np.asarray(n_grid, dtype=float))
    for key in keys:
        mse = np.array([r.cell(key[0], key[2], key[1]).mse for r in reports])
        if np.all(mse > 0):
            slopes[key] = float(np.polyfit(logn, np.log(mse), 1)[0])
            scaled[key] = list(np.asarray(n_grid) * mse)
    return RateReport(n_grid=n_grid, reports=reports, slopes=slopes, scaled_mse=scaled)
