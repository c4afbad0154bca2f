import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from acovdiff.signal import (
    SMOOTH_COMPONENTS,
    DifferenceScheme,
    StepSignal,
    check_jump_separation,
    constant_signal,
    evaluate_mean,
    get_smooth,
    max_jump,
    quadratic_variation,
    scheme_bias_polynomial,
    simulation_signal,
    total_variation,
    weighted_jump_functional,
)
from oracles import bias_polynomial_literal, step_values_literal

ZERO = get_smooth("zero")


# ---------------------------------------------------------------- construction


@pytest.mark.parametrize(
    "levels, bps",
    [
        ([0, 1], [0, 0.6, 0.4, 1]),  # wrong count
        ([0, 1], [0, 0.5, 0.5]),  # does not end at 1
        ([0, 1, 2], [0, 0.6, 0.4, 1]),  # not increasing
        ([0, 0], [0, 0.5, 1]),  # equal adjacent levels
        ([], [0]),
    ],
)
def test_invalid_step_signal_rejected(levels, bps):
    with pytest.raises(ValueError):
        StepSignal(levels, bps)


def test_step_signal_roundtrip_dict():
    s = simulation_signal()
    assert StepSignal.from_dict(s.to_dict()) == s


def test_difference_scheme_validation():
    with pytest.raises(ValueError):
        DifferenceScheme((1.0,))
    with pytest.raises(ValueError):
        DifferenceScheme((1.0, -1.0), gap=0)
    with pytest.raises(ValueError):
        DifferenceScheme((0.0, 0.0))
    s = DifferenceScheme((1.0, -2.0, 1.0), gap=3)
    assert (s.order, s.norm, s.span) == (2, 6.0, 6)
    assert s.annihilates_constants()
    with pytest.raises(ValueError):
        DifferenceScheme((1.0, -0.5)).check_zero_sum()


# ---------------------------------------------------------------- evaluate_mean


def test_mean_single_segment_zero():
    assert evaluate_mean(constant_signal(), ZERO, 4).tolist() == [0, 0, 0, 0]


def test_mean_half_open_segments():
    s = StepSignal([0, 10], [0, 0.5, 1])
    assert evaluate_mean(s, ZERO, 4).tolist() == [0, 10, 10, 10]


def test_mean_linear_trend():
    np.testing.assert_allclose(evaluate_mean(constant_signal(), get_smooth("f1"), 2), [0, -1])


def test_mean_requires_two_points():
    with pytest.raises(ValueError):
        evaluate_mean(constant_signal(), ZERO, 1)


def test_mean_matches_literal_segment_lookup():
    s = simulation_signal()
    for n in (7, 100, 1600, 3000):
        np.testing.assert_array_equal(
            evaluate_mean(s, ZERO, n), step_values_literal(s.levels, s.breakpoints, n)
        )


def test_simulation_signal_shape():
    s = simulation_signal()
    assert s.levels == (0, 10, 0, 1, 0, 1, 0)
    mu = evaluate_mean(s, ZERO, 1600)
    assert np.count_nonzero(np.diff(mu)) == 6


def test_unknown_smooth_lists_options():
    with pytest.raises(KeyError, match="f1"):
        get_smooth("f9")


@pytest.mark.parametrize("name", sorted(SMOOTH_COMPONENTS))
def test_builtin_smooth_integrates_to_zero(name):
    x = np.linspace(0.0, 1.0, 1_000_000)
    assert abs(trapezoid(get_smooth(name)(x), x)) < 1e-6


# ---------------------------------------------------------------- functionals


def test_quadratic_and_total_variation():
    assert quadratic_variation(constant_signal()) == 0
    assert total_variation(constant_signal()) == 0
    s = StepSignal([0, 10, 0], [0, 0.3, 0.6, 1])
    assert quadratic_variation(s) == 200
    assert total_variation(s) == 20
    assert quadratic_variation(simulation_signal()) == 204
    assert total_variation(simulation_signal()) == 24
    assert max_jump(simulation_signal()) == 10


def test_weighted_jump_functional():
    assert weighted_jump_functional(constant_signal(), 100, 3) == 0
    assert weighted_jump_functional(StepSignal([0, 1], [0, 0.5, 1]), 100, 2) == 49
    assert weighted_jump_functional(StepSignal([0, 10, 0], [0, 0.25, 0.75, 1]), 8, 1) == 70


def test_bias_polynomial_examples():
    assert scheme_bias_polynomial(DifferenceScheme((1.0, -1.0))) == 1
    assert scheme_bias_polynomial(DifferenceScheme((0.5, -0.5))) == 0.25
    # S_0 = 1, S_1 = -1: 1*1 + 2*1 + 2*(1*1*(-1)) = 1
    assert scheme_bias_polynomial((1.0, -2.0, 1.0)) == pytest.approx(1.0)
    assert bias_polynomial_literal((1.0, -2.0, 1.0)) == pytest.approx(1.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=6))
def test_bias_polynomial_matches_literal_and_is_even(d):
    if not any(d[:-1]) and not d[-1]:
        return
    assert scheme_bias_polynomial(d) == pytest.approx(bias_polynomial_literal(d), abs=1e-9)
    assert scheme_bias_polynomial([-x for x in d]) == pytest.approx(
        scheme_bias_polynomial(d), abs=1e-9
    )


def test_jump_separation_examples():
    assert check_jump_separation(constant_signal(), 10, 1, 5)
    assert check_jump_separation(StepSignal([0, 1], [0, 0.5, 1]), 100, 1, 1)
    assert not check_jump_separation(StepSignal([0, 1], [0, 0.01, 1]), 100, 1, 1)


# ---------------------------------------------------------------- properties


@st.composite
def step_signals(draw):
    k = draw(st.integers(1, 8))
    cuts = sorted(set(draw(st.lists(st.floats(0.001, 0.999), min_size=k - 1, max_size=k - 1))))
    bps = [0.0, *cuts, 1.0]
    levels = [draw(st.floats(-20, 20, allow_nan=False))]
    for _ in range(len(bps) - 2):
        step = draw(st.floats(0.01, 10)) * draw(st.sampled_from([-1, 1]))
        levels.append(levels[-1] + step)
    return StepSignal(levels, bps)


@settings(max_examples=200, deadline=None)
@given(step_signals(), st.floats(-100, 100, allow_nan=False))
def test_jump_functional_properties(s, c):
    assert quadratic_variation(s) <= max_jump(s) * total_variation(s) * (1 + 1e-12) + 1e-12
    shifted = s.shifted(c)
    assert math.isclose(quadratic_variation(shifted), quadratic_variation(s), rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(total_variation(shifted), total_variation(s), rel_tol=1e-9, abs_tol=1e-9)


@settings(max_examples=100, deadline=None)
@given(step_signals(), st.integers(2, 400))
def test_zero_smooth_reproduces_levels(s, n):
    np.testing.assert_array_equal(
        evaluate_mean(s, ZERO, n), step_values_literal(s.levels, s.breakpoints, n)
    )


@settings(max_examples=200, deadline=None)
@given(step_signals(), st.integers(1, 500), st.integers(1, 500), st.integers(1, 3), st.integers(0, 4))
def test_jump_separation_monotone_in_n(s, n1, n2, order, m):
    lo, hi = sorted((n1, n2))
    if check_jump_separation(s, lo, order, m):
        assert check_jump_separation(s, hi, order, m)
