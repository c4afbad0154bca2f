"""Deterministic mean components: step function, smooth trend, difference schemes.

The regression mean is ``mu_i = f(i/n) + g(i/n)`` for ``i = 1..n`` where ``g`` is
piecewise constant. Breakpoint fractions are mapped to grid positions with
``t_j = floor(n * tau_j)`` and segment ``j`` owns the indices ``t_j <= i < t_{j+1}``;
the last segment also owns ``i = n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# floor(n * tau) is taken after adding this slack so that e.g. 0.29 * 100 maps to 29
_GRID_EPS = 1e-9


@dataclass(frozen=True)
class StepSignal:
    """Piecewise-constant component with ``K = len(levels)`` segments."""

    levels: tuple[float, ...]
    breakpoints: tuple[float, ...]

    def __init__(self, levels: Sequence[float], breakpoints: Sequence[float]):
        levels = tuple(float(a) for a in levels)
        breakpoints = tuple(float(t) for t in breakpoints)
        if len(levels) < 1:
            raise ValueError("a step signal needs at least one level")
        if len(breakpoints) != len(levels) + 1:
            raise ValueError(
                f"expected {len(levels) + 1} breakpoints for {len(levels)} levels, "
                f"got {len(breakpoints)}"
            )
        if breakpoints[0] != 0.0 or breakpoints[-1] != 1.0:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(breakpoints, breakpoints[1:])):
            raise ValueError(f"breakpoints must be strictly increasing: {breakpoints}")
        for j, (a, b) in enumerate(zip(levels, levels[1:])):
            if a == b:
                raise ValueError(f"adjacent levels {j} and {j + 1} are equal ({a})")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "breakpoints", breakpoints)

    @property
    def n_segments(self) -> int:
        return len(self.levels)

    @property
    def jumps(self) -> np.ndarray:
        """Signed jump sizes ``a_{j+1} - a_j`` at the interior breakpoints."""
        return np.diff(np.asarray(self.levels, dtype=float))

    def grid_positions(self, n: int) -> np.ndarray:
        """Integer positions ``t_j = floor(n tau_j)`` for every breakpoint, ends included."""
        return np.array([math.floor(n * t + _GRID_EPS) for t in self.breakpoints], dtype=int)

    def shifted(self, c: float) -> "StepSignal":
        return StepSignal([a + c for a in self.levels], self.breakpoints)

    def to_dict(self) -> dict:
        return {"levels": list(self.levels), "breakpoints": list(self.breakpoints)}

    @classmethod
    def from_dict(cls, d: dict) -> "StepSignal":
        return cls(d["levels"], d["breakpoints"])


def constant_signal(level: float = 0.0) -> StepSignal:
    """The no-change-point signal (``K = 1``)."""
    return StepSignal([level], [0.0, 1.0])


# Change points at 1/6 -+ 1/36, 3/6 -+ 2/36 and 5/6 -+ 3/36 of the sample.
SIMULATION_BREAKPOINTS = (
    0.0,
    1 / 6 - 1 / 36,
    1 / 6 + 1 / 36,
    3 / 6 - 2 / 36,
    3 / 6 + 2 / 36,
    5 / 6 - 3 / 36,
    5 / 6 + 3 / 36,
    1.0,
)
SIMULATION_LEVELS = (0.0, 10.0, 0.0, 1.0, 0.0, 1.0, 0.0)


def simulation_signal() -> StepSignal:
    """Six change points; level 10 in the second segment, then 0/1 alternating."""
    return StepSignal(SIMULATION_LEVELS, SIMULATION_BREAKPOINTS)


@dataclass(frozen=True)
class SmoothComponent:
    """A named smooth trend on ``[0, 1]``.

    User-supplied functions should integrate to zero over ``[0, 1]``; otherwise the
    trend and the step levels are not separately identifiable. This is not checked.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(compare=False)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


def _zero(x):
    return np.zeros_like(x)


def _linear(x):
    return 1.0 - 2.0 * x


def _quadratic(x):
    return 4.0 * (x - 0.5) ** 2 - 1.0 / 3.0


def _periodic(x):
    return np.sin(16.0 * np.pi * x)


SMOOTH_COMPONENTS: dict[str, SmoothComponent] = {
    "zero": SmoothComponent("zero", _zero),
    "f1": SmoothComponent("f1", _linear),
    "f2": SmoothComponent("f2", _quadratic),
    "f3": SmoothComponent("f3", _periodic),
}


def get_smooth(name: str) -> SmoothComponent:
    try:
        return SMOOTH_COMPONENTS[name]
    except KeyError:
        raise KeyError(
            f"unknown smooth component {name!r}; choose from {sorted(SMOOTH_COMPONENTS)}"
        ) from None


@dataclass(frozen=True)
class DifferenceScheme:
    """Weights ``d_0..d_l`` applied to observations ``gap`` positions apart."""

    weights: tuple[float, ...]
    gap: int = 1

    def __init__(self, weights: Sequence[float], gap: int = 1):
        weights = tuple(float(w) for w in weights)
        if len(weights) < 2:
            raise ValueError("a difference scheme needs order l >= 1 (at least two weights)")
        if int(gap) != gap or gap < 1:
            raise ValueError(f"gap must be a positive integer, got {gap}")
        if sum(w * w for w in weights) <= 0:
            raise ValueError("weights must not all be zero")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "gap", int(gap))

    @property
    def order(self) -> int:
        return len(self.weights) - 1

    @property
    def norm(self) -> float:
        """``p(d)``, the sum of squared weights."""
        return float(sum(w * w for w in self.weights))

    @property
    def span(self) -> int:
        """Index distance between the first and last observation used, ``l * gap``."""
        return self.order * self.gap

    def annihilates_constants(self, tol: float = 1e-12) -> bool:
        return abs(sum(self.weights)) <= tol * max(1.0, max(abs(w) for w in self.weights))

    def check_zero_sum(self) -> None:
        if not self.annihilates_constants():
            raise ValueError(f"difference weights must sum to zero, got {self.weights}")

    def describe(self) -> str:
        w = ",".join(f"{v:g}" for v in self.weights)
        return f"d=({w}),gap={self.gap}"


def evaluate_mean(step: StepSignal, smooth: SmoothComponent, n: int) -> np.ndarray:
    """Return ``mu_i = f(i/n) + g(i/n)`` for ``i = 1..n``."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    idx = np.arange(1, n + 1)
    t = step.grid_positions(n)
    # segment j owns t_j <= i < t_{j+1}; indices at or beyond t_K stay in the last one
    seg = np.searchsorted(t[1:-1], idx, side="right")
    g = np.asarray(step.levels)[seg]
    return smooth(idx / n) + g


def quadratic_variation(step: StepSignal) -> float:
    """``J_K``: sum of squared jump sizes."""
    return float(np.sum(step.jumps**2))


def total_variation(step: StepSignal) -> float:
    """``J_K^||``: sum of absolute jump sizes."""
    return float(np.sum(np.abs(step.jumps)))


def max_jump(step: StepSignal) -> float:
    j = step.jumps
    return float(np.max(np.abs(j))) if j.size else 0.0


def weighted_jump_functional(step: StepSignal, n: int, h: int) -> float:
    """``sum_j (t_j - h/2) |a_{j-1} - a_j|`` over the interior change points.

    With ``h = m + 1`` this is the functional entering the variance of the lag-0
    estimator.
    """
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    t = step.grid_positions(n)[1:-1]
    return float(np.sum((t - h / 2.0) * np.abs(step.jumps)))


def segment_slack(step: StepSignal, n: int, order: int, m: int) -> np.ndarray:
    """``kappa_{j,l} = t_{j+1} - t_j - l(m+1)`` for each segment."""
    t = step.grid_positions(n)
    return np.diff(t) - order * (m + 1)


def scheme_bias_polynomial(scheme: DifferenceScheme | Sequence[float]) -> float:
    """Jump-bias polynomial ``P_l(d)`` of a difference scheme.

    With partial sums ``S_r = d_0 + ... + d_r``::

        P_l(d) = sum_{r<l} (r+1) S_r^2 + 2 sum_{r<l-1} (r+1) S_r sum_{r<s<l} S_s
    """
    d = scheme.weights if isinstance(scheme, DifferenceScheme) else tuple(scheme)
    order = len(d) - 1
    if order < 1:
        raise ValueError("P_l(d) needs l >= 1")
    s = np.cumsum(np.asarray(d, dtype=float))[:order]
    r1 = np.arange(1, order + 1)
    total = float(np.sum(r1 * s**2))
    # tail[r] = S_{r+1} + ... + S_{l-1}
    tail = np.concatenate([np.cumsum(s[::-1])[::-1][1:], [0.0]])
    total += 2.0 * float(np.sum(r1 * s * tail))
    return total


def check_jump_separation(step: StepSignal, n: int, order: int, m: int) -> bool:
    """True when every gap between adjacent breakpoints exceeds ``l(m+1)/n``.

    The end segments count too. A signal without change points always passes.
    """
    if step.n_segments == 1:
        return True
    return bool(np.min(np.diff(step.breakpoints)) > order * (m + 1) / n)
