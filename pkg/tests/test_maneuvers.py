import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from alks_scenarios.exceptions import TriggerError
from alks_scenarios.maneuvers import (
    CubicBrakeProfile,
    SinusoidalLaneChange,
    cubic_velocity,
    feasible_trigger_time,
    initial_gap_for_trigger,
    lane_change_duration,
    peak_deceleration,
    sinusoidal_lateral,
)

speeds = st.floats(1.0, 40.0)
durations = st.floats(0.5, 10.0)


def test_cubic_velocity_examples():
    p = CubicBrakeProfile(19.44, 13.89, 4.0)
    assert cubic_velocity(p, 0.0) == pytest.approx(19.44)
    assert cubic_velocity(p, 4.0) == pytest.approx(13.89)
    assert cubic_velocity(p, 2.0) == pytest.approx(16.665)
    assert p.acceleration(0.0) == 0.0 and p.acceleration(4.0) == 0.0
    with pytest.raises(ValueError):
        cubic_velocity(p, 4.1)
    with pytest.raises(ValueError):
        cubic_velocity(p, -0.1)


def test_peak_deceleration_examples():
    # frozen from a 1 ms finite-difference grid search: 2.0812498, 2.9999996
    assert peak_deceleration(CubicBrakeProfile(19.44, 13.89, 4.0)) == pytest.approx(2.08125, abs=1e-3)
    assert peak_deceleration(CubicBrakeProfile(20.0, 14.0, 3.0)) == pytest.approx(3.0, abs=1e-3)
    assert peak_deceleration(CubicBrakeProfile(15.0, 15.0, 3.0)) == 0.0


def test_distance_example():
    # scipy quadrature of the profile: 66.66 m
    assert CubicBrakeProfile(19.44, 13.89, 4.0).distance(4.0) == pytest.approx(66.66, rel=1e-12)


def test_sinusoidal_examples():
    p = SinusoidalLaneChange(0.0, 3.5, 80.0)
    assert sinusoidal_lateral(p, 0.0) == 0.0
    assert sinusoidal_lateral(p, 80.0) == 3.5
    assert sinusoidal_lateral(p, 40.0) == pytest.approx(1.75)
    assert p.slope(0.0) == 0.0 and p.slope(80.0) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        sinusoidal_lateral(p, 81.0)
    with pytest.raises(ValueError):
        SinusoidalLaneChange(0.0, 3.5, 0.0)


def test_initial_gap_examples():
    assert initial_gap_for_trigger(30.0, 20.0, 15.0) == 55.0
    assert initial_gap_for_trigger(20.0, 15.0, 15.0) == 20.0
    with pytest.raises(TriggerError, match="shorten"):
        initial_gap_for_trigger(5.0, 15.0, 18.0)
    with pytest.raises(ValueError):
        initial_gap_for_trigger(0.0, 15.0, 15.0)


def test_feasible_trigger_time():
    assert feasible_trigger_time(30.0, 20.0, 15.0) == 5.0
    # gap closes only after D / (v_ch - v_ego) = 5/3 s; half of that, rounded down
    t = feasible_trigger_time(5.0, 15.0, 18.0)
    assert t == 0.8
    assert initial_gap_for_trigger(5.0, 15.0, 18.0, t) > 0


def test_lane_change_duration():
    assert lane_change_duration(80.0, 15.0, 15.0) == pytest.approx(80.0 / 15.0)
    assert lane_change_duration(62.0, 16.0, 15.0) == pytest.approx(4.0)


@settings(max_examples=100, deadline=None)
@given(v0=speeds, dv=st.floats(0.0, 20.0), T=durations)
def test_cubic_monotone_non_increasing(v0, dv, T):
    p = CubicBrakeProfile(v0, max(v0 - dv, 0.0), T)
    v = np.array([p.velocity(t) for t in np.linspace(0.0, T, 401)])
    assert np.all(np.diff(v) <= 1e-12)


@settings(max_examples=100, deadline=None)
@given(v0=speeds, vf=speeds, T=durations)
def test_cubic_distance_matches_quadrature(v0, vf, T):
    p = CubicBrakeProfile(v0, vf, T)
    numeric, _ = quad(p.velocity, 0.0, T, epsabs=0, epsrel=1e-12)
    assert numeric == pytest.approx(T * (v0 + vf) / 2.0, rel=1e-6)
    assert p.distance(T) == pytest.approx(T * (v0 + vf) / 2.0, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(v0=speeds, dv=st.floats(0.1, 20.0), T=durations)
def test_peak_deceleration_matches_grid(v0, dv, T):
    p = CubicBrakeProfile(v0, v0 - dv, T)
    t = np.linspace(0.0, T, int(T / 1e-3) + 1)
    u = t / T
    v = p.v0 + (p.vf - p.v0) * (3 * u ** 2 - 2 * u ** 3)
    grid = np.max(-np.diff(v) / np.diff(t))
    assert abs(grid - peak_deceleration(p)) <= 1e-3


@settings(max_examples=200, deadline=None)
@given(d0=st.floats(-10, 10), df=st.floats(-10, 10), S=st.floats(1.0, 300.0),
       frac=st.floats(0.0, 0.5))
def test_sinusoid_symmetric_and_monotone(d0, df, S, frac):
    p = SinusoidalLaneChange(d0, df, S)
    u = frac * S
    assert p.lateral(S / 2 + u) + p.lateral(S / 2 - u) == pytest.approx(d0 + df, abs=1e-9)
    y = np.array([p.lateral(s) for s in np.linspace(0, S, 201)])
    step = np.diff(y) * math.copysign(1.0, df - d0)
    assert np.all(step >= -1e-12)


@settings(max_examples=100, deadline=None)
@given(D=st.floats(1.0, 150.0), v_e=speeds, v_c=speeds, t=st.floats(0.5, 10.0))
def test_initial_gap_reproduces_trigger_distance(D, v_e, v_c, t):
    try:
        g0 = initial_gap_for_trigger(D, v_e, v_c, t)
    except TriggerError:
        assert D + t * (v_e - v_c) <= 0
        return
    gap_at_t = (g0 + v_c * t) - v_e * t
    assert gap_at_t == pytest.approx(D, rel=1e-12, abs=1e-9)
