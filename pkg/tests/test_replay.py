import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alks_scenarios.exceptions import ReplayError
from alks_scenarios.extraction import BrakeScenario, CutInScenario, SwerveScenario
from alks_scenarios.replay import gap_at, maneuver_duration, replay, write_trace_csv

COMMON = dict(recording_id=1, ego_id=1, challenger_id=2, start_frame=0, end_frame=100,
              lane_id=1, driving_direction=2, lane_widths=(3.5, 3.5, 3.5), ego_length=4.5,
              ego_width=1.8, ego_class="Car", ch_length=4.5, ch_width=1.8, ch_class="Car",
              speed_limit=None)


def brake(D=30.0, v_e=20.0, v_c=15.0, T=4.0, vf=10.0):
    return BrakeScenario(**COMMON, v_ego0=v_e, v_ch0=v_c, initial_distance=D, brake_duration=T,
                         v_ch_final=vf, peak_deceleration=1.5 * (v_c - vf) / T)


def cutin(S=80.0, v_e=14.0, v_c=15.0, vf=15.0, D=20.0, rel=1, off0=0.0, off1=0.0, lane=1):
    return CutInScenario(**{**COMMON, "lane_id": lane}, v_ego0=v_e, v_ch0=v_c, initial_distance=D, relative_lane=rel,
                         initial_lane_offset=off0, cutin_distance=S, v_ch_final=vf,
                         final_lane_offset=off1, thw0=D / v_e)


@pytest.mark.parametrize("dt", [0.04, 0.01, 0.1])
def test_brake_example(dt):
    trace = replay(brake(), dt)
    assert trace.trigger_time == pytest.approx(5.0, abs=dt)
    i = int(round((trace.trigger_time + 2.0) / dt))
    assert trace.ch_v[i] == pytest.approx(12.5, abs=0.02)
    assert gap_at(trace, 0.0) == pytest.approx(55.0, abs=1e-9)
    assert gap_at(trace, trace.trigger_time) == pytest.approx(30.0, abs=5.0 * dt)
    assert np.all(trace.ego_v == 20.0)
    assert trace.t[-1] == pytest.approx(trace.trigger_time + 4.0 + 2.0, abs=dt / 2)
    with pytest.raises(IndexError):
        gap_at(trace, trace.t[-1] + 1.0)
    with pytest.raises(IndexError):
        gap_at(trace, -1.0)


def test_cutin_reaches_final_lateral_position():
    s = cutin()
    dt = 0.04
    trace = replay(s, dt)
    y_final = s.lane_center(1)
    reached = trace.t[np.flatnonzero(np.abs(trace.ch_y - y_final) < 1e-12)[0]]
    assert reached - trace.trigger_time == pytest.approx(80.0 / 15.0, abs=2 * dt)
    assert trace.ch_y[0] == pytest.approx(s.lane_center(2))
    assert maneuver_duration(s) == pytest.approx(80.0 / 15.0)


def test_cutin_lateral_follows_integrated_travel():
    # reference: dense-grid integration of the same profile
    s = cutin(v_c=16.0, vf=12.0)
    coarse, fine = replay(s, 0.04), replay(s, 0.001)
    tau_c = coarse.t - coarse.trigger_time
    tau_f = fine.t - fine.trigger_time
    y_ref = np.interp(tau_c, tau_f, fine.ch_y)
    assert np.max(np.abs(coarse.ch_y - y_ref)) < 0.01


def test_swerve_replay_amplitude():
    s = SwerveScenario(**{**COMMON, "lane_id": 2}, v_ego0=15.0, v_ch0=16.0, initial_distance=20.0,
                       relation="Lead", relative_lane=0, lateral_range=1.4,
                       max_lateral_acceleration=1.0)
    trace = replay(s)
    centre = s.lane_center(2)
    assert np.max(trace.ch_y) - np.min(trace.ch_y) == pytest.approx(1.4, abs=0.01)
    assert trace.ch_y[-1] == pytest.approx(centre)
    assert np.all(trace.ch_v == 16.0)


def test_equal_speeds_trigger_on_time():
    trace = replay(brake(v_e=15.0, v_c=15.0))
    assert trace.trigger_time == pytest.approx(5.0)
    assert gap_at(trace, 0.0) == pytest.approx(30.0)


def test_timestep_bounds():
    for dt in (0.0, -0.01, 0.2):
        with pytest.raises(ValueError):
            replay(brake(), dt)


def test_trigger_time_beyond_wait_limit():
    with pytest.raises(ReplayError):
        replay(brake(v_e=15.0, v_c=15.0), t_trigger=61.0)


def test_determinism_and_csv(tmp_path):
    a, b = replay(cutin()), replay(cutin())
    for name in ("t", "ego_x", "ch_x", "ch_y", "ch_v"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    path = write_trace_csv(a, tmp_path / "trace.csv")
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "ego_x", "ego_y", "ego_v", "ch_x", "ch_y", "ch_v"]
    assert len(rows) == len(a.t) + 1
    assert float(rows[-1][4]) == a.ch_x[-1]
    assert write_trace_csv(b, tmp_path / "again.csv").read_bytes() == path.read_bytes()


@settings(max_examples=40, deadline=None)
@given(D=st.floats(10.0, 60.0), v_e=st.floats(8.0, 30.0), dv=st.floats(-5.0, 5.0),
       T=st.floats(1.0, 6.0), drop=st.floats(1.0, 6.0), dt=st.sampled_from([0.01, 0.02, 0.04, 0.1]))
def test_trigger_gap_property(D, v_e, dv, T, drop, dt):
    v_c = max(v_e + dv, 7.5)
    s = brake(D=D, v_e=v_e, v_c=v_c, T=T, vf=v_c - drop)
    trace = replay(s, dt)
    assert np.all(np.diff(trace.t) == pytest.approx(dt))
    v_rel = abs(v_e - v_c)
    gap = gap_at(trace, trace.trigger_time)
    if trace.trigger_time < 5.0 - 1e-9 and (v_e - v_c) * (gap - D) > 1e-9:
        pytest.fail("fired before the gap crossed the trigger distance")
    assert abs(gap - D) <= v_rel * dt + 1e-9


@settings(max_examples=30, deadline=None)
@given(S=st.floats(30.0, 120.0), v_c=st.floats(10.0, 30.0), dv=st.floats(-5.0, 2.0),
       off0=st.floats(-0.5, 0.5), off1=st.floats(-0.5, 0.5), rel=st.sampled_from([-1, 1]))
def test_cutin_endpoint_property(S, v_c, dv, off0, off1, rel):
    s = cutin(S=S, v_e=v_c - 1.0, v_c=v_c, vf=v_c + dv, rel=rel, off0=off0, off1=off1, lane=2)
    trace = replay(s)
    done = trace.t >= trace.trigger_time + maneuver_duration(s) - 1e-9
    assert np.all(trace.ch_y[done] == s.lane_center(s.lane_id) + off1)
