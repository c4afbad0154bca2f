"""Asymptotic bias/variance expansions and exact Gaussian moments.

The ``predict_*`` functions evaluate the leading terms of the published
expansions as stated; ``O(.)`` remainders are reported as magnitudes and never
added to point predictions, because their constants are unknown.

:func:`gaussian_moments` is different: it computes the exact finite-sample mean
and variance of a linear combination of difference quadratic forms for
Gaussian errors with a given autocovariance sequence, via

    E[y'Ay]   = tr(A S) + mu'A mu
    Var[y'Ay] = 2 tr(A S A S) + 4 mu'A S A mu.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import toeplitz

from .signal import DifferenceScheme, scheme_bias_polynomial


@dataclass
class AsymptoticPrediction:
    expected_value: float
    variance: float
    leading_terms: dict = field(default_factory=dict)
    hypotheses: tuple[str, ...] = ()


def _n_m(n: int, m: int) -> int:
    if n <= m + 1:
        raise ValueError(f"need n > m + 1, got n = {n}, m = {m}")
    return n - (m + 1)


def predict_mean_gamma0(gamma0: float, m: int, n: int, jk: float) -> float:
    """Leading-order mean of the lag-0 estimator: ``gamma0 + (m+1) J_K / (4 n_m)``."""
    return gamma0 + (m + 1) * jk / (4.0 * _n_m(n, m))


def predict_mean_qh(gamma0: float, gamma_h: float, h: int, n: int, jk: float) -> float:
    """Leading-order mean of the gap-``h`` first-difference form."""
    if n <= h:
        raise ValueError(f"need n > h, got n = {n}, h = {h}")
    return gamma0 - gamma_h + h * jk / (4.0 * (n - h))


def predict_var_gamma0(gamma0: float, m: int, n: int, jk: float) -> float:
    """``(2m+3) gamma0^2 / n + (m+1)(m+2) gamma0 J_K / n^2``.

    Stated for Gaussian errors; no scheme argument since the leading terms do
    not depend on the difference weights.
    """
    return (2 * m + 3) * gamma0**2 / n + (m + 1) * (m + 2) * gamma0 * jk / n**2


def predict_gamma0(gamma0: float, m: int, n: int, jk: float, jk_tv: float) -> AsymptoticPrediction:
    n_m = _n_m(n, m)
    return AsymptoticPrediction(
        expected_value=predict_mean_gamma0(gamma0, m, n, jk),
        variance=predict_var_gamma0(gamma0, m, n, jk),
        leading_terms={
            "main": gamma0,
            "jump_correction": (m + 1) * jk / (4.0 * n_m),
            "remainder_order": (m + 1) * jk_tv / n_m**2,
        },
        hypotheses=("gaussian errors", "H_K = o(n^3)", "J_K^|| = o(n)"),
    )


def predict_var_gammah_order(
    gamma0: float, m: int, h: int, n: int, jk: float, h_kh: float
) -> dict[str, float]:
    """Magnitudes of the three order terms in the lag-``h`` variance.

    Only rates are known, so the values are ``J_K/n^2``, ``H_{K,h}/n^3`` and
    ``1/n`` without constants. ``gamma0`` is accepted for signature symmetry.
    """
    if not 1 <= h <= m:
        raise ValueError(f"need 1 <= h <= m, got h = {h}, m = {m}")
    return {"jump_quadratic": jk / n**2, "jump_weighted": h_kh / n**3, "noise": 1.0 / n}


@dataclass(frozen=True)
class RegimeDiagnostic:
    n: int
    epsilon: float
    changepoint_ratio: float
    jump_ratio: float


def check_rootn_regime(k_n: int, max_jump: float, n: int, eps: float) -> RegimeDiagnostic:
    """Ratios ``K_n / n^(1/2 - eps)`` and ``max_jump / n^(eps/2)``.

    Both should shrink along a growing sequence of ``n`` for the root-n rate;
    one evaluation on its own is descriptive only.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2), got {eps}")
    return RegimeDiagnostic(
        n=n,
        epsilon=eps,
        changepoint_ratio=k_n / n ** (0.5 - eps),
        jump_ratio=max_jump / n ** (eps / 2.0),
    )


def predict_bias_general(
    scheme: DifferenceScheme, m: int, n: int, jk: float, jk_tv: float
) -> dict[str, float]:
    """Magnitudes of the two bias terms for an order-``l`` scheme at gap ``m + 1``."""
    scheme.check_zero_sum()
    order = scheme.order
    n_lm = n - order * (m + 1)
    if n_lm < 1:
        raise ValueError(f"n = {n} too small for order {order} at gap {m + 1}")
    p = scheme.norm
    partial = np.cumsum(scheme.weights)[:order]
    return {
        "total_variation": (m + 1) * jk_tv / (2.0 * n_lm**2 * p) * float(np.sum(np.abs(partial))),
        "quadratic_variation": (m + 1) * jk * scheme_bias_polynomial(scheme) / (2.0 * n_lm * p),
    }


# ---------------------------------------------------------------------------
# exact Gaussian moments


def difference_matrix(n: int, scheme: DifferenceScheme) -> np.ndarray:
    """``(n - l*gap) x n`` matrix whose rows apply the scheme at each start index."""
    n_eff = n - scheme.span
    if n_eff < 1:
        raise ValueError(f"n = {n} too short for {scheme.describe()}")
    out = np.zeros((n_eff, n))
    rows = np.arange(n_eff)
    for s, w in enumerate(scheme.weights):
        out[rows, rows + s * scheme.gap] += w
    return out


def estimator_matrix(n: int, terms: Sequence[tuple[float, DifferenceScheme]]) -> np.ndarray:
    """Symmetric ``A`` with ``y'Ay = sum_k c_k Q(y; scheme_k)``."""
    a = np.zeros((n, n))
    for coef, scheme in terms:
        d = difference_matrix(n, scheme)
        a += coef / (scheme.norm * d.shape[0]) * (d.T @ d)
    return a


def gamma_h_terms(m: int, h: int, d0: float = 1.0, d1: float = -1.0):
    """Quadratic-form terms of the lag-``h`` estimator (``h = 0`` for the variance)."""
    terms = [(1.0, DifferenceScheme((d0, d1), gap=m + 1))]
    if h > 0:
        terms.append((-1.0, DifferenceScheme((1.0, -1.0), gap=h)))
    return terms


def covariance_matrix(acf: Sequence[float], n: int) -> np.ndarray:
    col = np.zeros(n)
    acf = np.asarray(acf, dtype=float)[:n]
    col[: acf.size] = acf
    return toeplitz(col)


def gaussian_moments(
    mean: np.ndarray, acf: Sequence[float], terms: Sequence[tuple[float, DifferenceScheme]]
) -> tuple[float, float]:
    """Exact ``(E, Var)`` of ``sum_k c_k Q(y; scheme_k)`` for ``y ~ N(mean, S)``.

    ``S`` is the Toeplitz matrix of ``acf`` (zero beyond its length), so pass
    enough lags for processes that are not finitely dependent.
    """
    mean = np.asarray(mean, dtype=float)
    n = mean.size
    a = estimator_matrix(n, terms)
    s = covariance_matrix(acf, n)
    a_s = a @ s
    a_mu = a @ mean
    expected = float(np.trace(a_s) + mean @ a_mu)
    variance = float(2.0 * np.sum(a_s * a_s.T) + 4.0 * a_mu @ s @ a_mu)
    return expected, variance


def delta_method_rho_variance(gamma0: float, gamma_h: float, cov: np.ndarray) -> float:
    """First-order variance of ``gamma_h_hat / gamma0_hat`` given the 2x2 covariance."""
    grad = np.array([-gamma_h / gamma0**2, 1.0 / gamma0])
    return float(grad @ cov @ grad)


__all__ = [
    "AsymptoticPrediction",
    "RegimeDiagnostic",
    "check_rootn_regime",
    "covariance_matrix",
    "delta_method_rho_variance",
    "difference_matrix",
    "estimator_matrix",
    "gamma_h_terms",
    "gaussian_moments",
    "predict_bias_general",
    "predict_gamma0",
    "predict_mean_gamma0",
    "predict_mean_qh",
    "predict_var_gamma0",
    "predict_var_gammah_order",
]
