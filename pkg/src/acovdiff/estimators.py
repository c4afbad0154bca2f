"""Difference-based autocovariance estimators.

The basic building block is the normalised quadratic form

    Q(y; d, gap) = 1 / (p(d) * N) * sum_{i=1}^{N} (sum_s d_s y_{i + s*gap})^2,

with ``N = n - l*gap`` and ``p(d) = sum_s d_s^2``. For ``m``-dependent errors
the lag-0 estimate is ``Q`` with a first-order scheme at gap ``m + 1``; lag
``h`` estimates subtract ``Q`` of plain first differences at gap ``h``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .signal import DifferenceScheme


class SeriesTooShortError(ValueError):
    """The series cannot support the requested differences."""


@dataclass
class AcfEstimate:
    """Estimated autocovariances and the derived autocorrelations.

    ``rho`` is ``None`` when ``gamma[0]`` is not positive (e.g. a constant
    series); ``flags`` then says why.
    """

    gamma: np.ndarray
    rho: np.ndarray | None
    n: int
    m: int
    method: str
    scheme: str
    flags: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.rho is not None

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "n": self.n,
            "m": self.m,
            "scheme": self.scheme,
            "gamma": [float(g) for g in self.gamma],
            "rho": None if self.rho is None else [float(r) for r in self.rho],
            "flags": list(self.flags),
            **self.meta,
        }


def _as_series(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError(f"expected a one-dimensional series, got shape {y.shape}")
    return y


def _first_difference_ss(y: np.ndarray, gap: int) -> tuple[float, int]:
    d = y[gap:] - y[:-gap]
    return float(d @ d), d.size


def quadratic_form(y, scheme: DifferenceScheme) -> float:
    """Normalised sum of squared ``l``-th order differences at the scheme's gap."""
    y = _as_series(y)
    n_eff = y.size - scheme.span
    if n_eff < 1:
        raise SeriesTooShortError(
            f"series of length {y.size} is too short for {scheme.describe()} "
            f"(needs more than {scheme.span} values)"
        )
    g = scheme.gap
    delta = np.zeros(n_eff)
    for s, w in enumerate(scheme.weights):
        delta += w * y[s * g : s * g + n_eff]
    return float(delta @ delta) / (scheme.norm * n_eff)


def _lag_zero_scheme(m: int, d0: float, d1: float) -> DifferenceScheme:
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if d0 == 0 or not math.isclose(d0 + d1, 0.0, abs_tol=1e-12 * abs(d0)):
        raise ValueError(f"need d0 + d1 = 0 with d0 != 0, got ({d0}, {d1})")
    return DifferenceScheme((d0, d1), gap=m + 1)


def estimate_gamma0(y, m: int, d0: float = 1.0, d1: float = -1.0) -> float:
    """Lag-0 autocovariance from first-order differences at gap ``m + 1``."""
    y = _as_series(y)
    scheme = _lag_zero_scheme(m, d0, d1)
    if y.size <= m + 1:
        raise SeriesTooShortError(f"need n > m + 1 = {m + 1}, got n = {y.size}")
    return quadratic_form(y, scheme)


def _qh(y: np.ndarray, h: int) -> float:
    ss, count = _first_difference_ss(y, h)
    return ss / (2.0 * count)


def estimate_gamma_h(y, m: int, h: int, d0: float = 1.0, d1: float = -1.0) -> float:
    """Lag-``h`` autocovariance, ``1 <= h <= m``; may be negative."""
    if not 1 <= h <= m:
        raise ValueError(f"lag h must satisfy 1 <= h <= m = {m}, got {h}")
    y = _as_series(y)
    return estimate_gamma0(y, m, d0, d1) - _qh(y, h)


def _with_rho(gamma: np.ndarray, **kw) -> AcfEstimate:
    flags = []
    rho = None
    if gamma[0] > 0:
        rho = gamma / gamma[0]
    else:
        flags.append("nonpositive_gamma0")
    return AcfEstimate(gamma=gamma, rho=rho, flags=flags, **kw)


def estimate_acf(y, m: int, d0: float = 1.0, d1: float = -1.0) -> AcfEstimate:
    """Autocovariances ``gamma_0..gamma_m`` under ``m``-dependence."""
    y = _as_series(y)
    g0 = estimate_gamma0(y, m, d0, d1)
    gamma = np.empty(m + 1)
    gamma[0] = g0
    for h in range(1, m + 1):
        gamma[h] = g0 - _qh(y, h)
    est = _with_rho(
        gamma,
        n=y.size,
        m=m,
        method="difference",
        scheme=DifferenceScheme((d0, d1), gap=m + 1).describe(),
    )
    if not est.ok:
        warnings.warn("estimated variance is zero; autocorrelations are undefined", stacklevel=2)
    return est


def hvk_bandwidths(n: int) -> tuple[int, int]:
    """Lag range ``(m1, m2) = (floor(n^0.4), floor(n^0.5))`` for the baseline."""
    return int(math.floor(n**0.4 + 1e-9)), math.isqrt(n)


def estimate_acf_hvk(y, maxlag: int, lags: tuple[int, int] | None = None) -> AcfEstimate:
    """Hall-Van Keilegom style estimate.

    The variance is the average of the half mean squared differences over the
    lag window ``m1..m2``; lag ``h`` subtracts the half mean squared difference
    at lag ``h``.
    """
    y = _as_series(y)
    n = y.size
    m1, m2 = lags if lags is not None else hvk_bandwidths(n)
    if maxlag < 0:
        raise ValueError("maxlag must be nonnegative")
    if not (1 <= m1 < m2 < n) or maxlag >= m1:
        raise SeriesTooShortError(
            f"n = {n} too small for the lag window: need 1 <= m1 < m2 < n and "
            f"maxlag < m1, got m1 = {m1}, m2 = {m2}, maxlag = {maxlag}"
        )
    theta = np.array([_qh(y, k) for k in range(1, m2 + 1)])
    g0 = float(np.mean(theta[m1 - 1 : m2]))
    gamma = np.empty(maxlag + 1)
    gamma[0] = g0
    gamma[1:] = g0 - theta[:maxlag]
    est = _with_rho(
        gamma, n=n, m=maxlag, method="hvk", scheme="d=(1,-1)", meta={"m1": m1, "m2": m2}
    )
    if not est.ok:
        warnings.warn("estimated variance is zero; autocorrelations are undefined", stacklevel=2)
    return est
