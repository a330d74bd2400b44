"""Fixed-timestep kinematic replay of concrete scenarios.

The ego keeps its initial speed.  The challenger starts at the back-calculated
gap, keeps its speed until the gap trigger fires and then runs the closed-form
maneuver of its scenario type.  Longitudinal positions are integrated with
the midpoint rule; lateral positions of a cut-in follow the sinusoid over the
integrated travel.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import ReplayError
from .extraction import BrakeScenario, CutInScenario, ScenarioRecord, SwerveScenario
from .maneuvers import (
    DEFAULT_TRIGGER_TIME,
    CubicBrakeProfile,
    SinusoidalLaneChange,
    feasible_trigger_time,
    initial_gap_for_trigger,
    lane_change_duration,
)

DEFAULT_TIMESTEP = 0.04
MAX_TRIGGER_WAIT = 60.0
POST_MANEUVER = 2.0
DEFAULT_SWERVE_PERIOD = 4.0

_TIME_EPS = 1e-9


@dataclass(eq=False)
class SimTrace:
    timestep: float
    t: np.ndarray
    ego_x: np.ndarray
    ego_y: np.ndarray
    ego_v: np.ndarray
    ch_x: np.ndarray
    ch_y: np.ndarray
    ch_v: np.ndarray
    trigger_time: float
    maneuver_duration: float
    trigger_distance: float
    ego_length: float
    ch_length: float

    @property
    def ego_states(self) -> np.ndarray:
        return np.column_stack([self.t, self.ego_x, self.ego_y, self.ego_v])

    @property
    def challenger_states(self) -> np.ndarray:
        return np.column_stack([self.t, self.ch_x, self.ch_y, self.ch_v])

    def gaps(self) -> np.ndarray:
        return (self.ch_x - self.ch_length / 2.0) - (self.ego_x + self.ego_length / 2.0)


class _Maneuver:
    """Challenger motion after the trigger, in maneuver-local time ``tau``."""

    def __init__(self, duration, speed, lateral):
        self.duration = duration
        self._speed = speed
        self._lateral = lateral

    def speed(self, tau):
        return self._speed(min(max(tau, 0.0), self.duration))

    def lateral(self, tau, travel):
        return self._lateral(tau, travel)


def _maneuver(scenario: ScenarioRecord, y_ch0: float) -> _Maneuver:
    if isinstance(scenario, BrakeScenario):
        profile = CubicBrakeProfile(scenario.v_ch0, scenario.v_ch_final, scenario.brake_duration)
        return _Maneuver(profile.duration, profile.velocity, lambda tau, s: y_ch0)

    if isinstance(scenario, CutInScenario):
        duration = lane_change_duration(scenario.cutin_distance, scenario.v_ch0, scenario.v_ch_final)
        profile = CubicBrakeProfile(scenario.v_ch0, scenario.v_ch_final, duration)
        y_final = scenario.lane_center(scenario.lane_id) + scenario.final_lane_offset
        shape = SinusoidalLaneChange(y_ch0, y_final, scenario.cutin_distance)

        def lateral(tau, s):
            if tau >= duration - _TIME_EPS or s >= shape.length:
                return y_final
            return shape.lateral(max(s, 0.0))

        return _Maneuver(duration, profile.velocity, lateral)

    if isinstance(scenario, SwerveScenario):
        amplitude = scenario.lateral_range / 2.0
        if scenario.max_lateral_acceleration > 0 and amplitude > 0:
            period = 2.0 * math.pi * math.sqrt(amplitude / scenario.max_lateral_acceleration)
        else:
            period = DEFAULT_SWERVE_PERIOD

        def lateral(tau, s):
            if tau >= period:
                return y_ch0
            return y_ch0 + amplitude * math.sin(2.0 * math.pi * tau / period)

        return _Maneuver(period, lambda tau: scenario.v_ch0, lateral)

    raise TypeError(f"cannot replay {type(scenario).__name__}")


def maneuver_duration(scenario: ScenarioRecord) -> float:
    """Length of the challenger maneuver once triggered, in seconds."""
    return _maneuver(scenario, 0.0).duration


def replay(scenario: ScenarioRecord, timestep: float = DEFAULT_TIMESTEP,
           t_trigger: float = DEFAULT_TRIGGER_TIME) -> SimTrace:
    """Simulate ``scenario`` and return both vehicles' trajectories.

    The trigger fires at the first step where the gap has passed the trigger
    distance in the direction of the relative motion, or once the simulation
    time reaches the trigger time (equal speeds never cross the distance).
    """
    if not 0 < timestep <= 0.1:
        raise ValueError(f"timestep must lie in (0, 0.1], got {timestep}")
    dt = float(timestep)
    D = scenario.trigger_distance
    v_e, v_c = scenario.v_ego0, scenario.v_ch0
    t_trig = feasible_trigger_time(D, v_e, v_c, t_trigger)
    if t_trig > MAX_TRIGGER_WAIT:
        raise ReplayError(f"trigger would not fire within {MAX_TRIGGER_WAIT} s")
    g0 = initial_gap_for_trigger(D, v_e, v_c, t_trig)
    closing = v_e - v_c

    ego_y = scenario.lane_center(scenario.lane_id)
    if isinstance(scenario, CutInScenario):
        ch_y0 = scenario.lane_center(scenario.source_lane) + scenario.initial_lane_offset
    elif isinstance(scenario, SwerveScenario):
        ch_y0 = scenario.lane_center(scenario.lane_id + scenario.relative_lane)
    else:
        ch_y0 = ego_y
    maneuver = _maneuver(scenario, ch_y0)
    half = 0.5 * (scenario.ego_length + scenario.ch_length)

    t_out, ex, cx, cy, cv = [], [], [], [], []
    x_e, x_c = 0.0, half + g0
    fired_at = None
    x_at_trigger = 0.0
    end_time = None
    n = 0
    while True:
        t = n * dt
        gap = x_c - x_e - half
        if fired_at is None:
            crossed = (closing > 0 and gap < D) or (closing < 0 and gap > D)
            if crossed or t >= t_trig - _TIME_EPS:
                fired_at, x_at_trigger = t, x_c
                end_time = t + maneuver.duration + POST_MANEUVER
            elif t > MAX_TRIGGER_WAIT:
                raise ReplayError(f"trigger did not fire within {MAX_TRIGGER_WAIT} s")

        if fired_at is None:
            v_now, y_now = v_c, ch_y0
        else:
            tau = t - fired_at
            v_now = maneuver.speed(tau)
            y_now = maneuver.lateral(tau, x_c - x_at_trigger)
        t_out.append(t)
        ex.append(x_e)
        cx.append(x_c)
        cy.append(y_now)
        cv.append(v_now)
        if end_time is not None and t >= end_time - _TIME_EPS:
            break

        mid = t + 0.5 * dt
        v_mid = v_c if fired_at is None else maneuver.speed(mid - fired_at)
        x_e += dt * v_e
        x_c += dt * v_mid
        n += 1

    size = len(t_out)
    return SimTrace(
        timestep=dt,
        t=np.asarray(t_out),
        ego_x=np.asarray(ex),
        ego_y=np.full(size, ego_y),
        ego_v=np.full(size, float(v_e)),
        ch_x=np.asarray(cx),
        ch_y=np.asarray(cy),
        ch_v=np.asarray(cv),
        trigger_time=fired_at,
        maneuver_duration=maneuver.duration,
        trigger_distance=D,
        ego_length=scenario.ego_length,
        ch_length=scenario.ch_length,
    )


def gap_at(trace: SimTrace, t: float) -> float:
    """Bumper gap at the sample nearest to ``t``."""
    i = int(round(t / trace.timestep))
    if t < -trace.timestep / 2 or i >= len(trace.t):
        raise IndexError(f"t={t} outside trace [0, {trace.t[-1]}]")
    return float(trace.gaps()[i])


TRACE_COLUMNS = ["t", "ego_x", "ego_y", "ego_v", "ch_x", "ch_y", "ch_v"]


def write_trace_csv(trace: SimTrace, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in zip(*(getattr(trace, c) for c in TRACE_COLUMNS)):
            writer.writerow([repr(float(v)) for v in row])
    return path
