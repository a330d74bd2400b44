import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alks_scenarios.detection import (
    DetectionConfig,
    detect_brake_maneuvers,
    detect_lane_changes,
    detect_swerving,
)
from alks_scenarios.ingest import Recording, Track, canonicalize
from alks_scenarios.synthetic import PlantSpec, synthesize_recording

from conftest import canonical_recording


def _pipeline(plants, **kw):
    raw, ledger = synthesize_recording(plants, **kw)
    return canonicalize(raw), ledger


def test_config_invariants():
    with pytest.raises(ValueError):
        DetectionConfig(brake_peak_threshold=0.0)
    with pytest.raises(ValueError):
        DetectionConfig(brake_peak_threshold=1.0, brake_edge_threshold=1.0)


def test_planted_lane_change_bounds():
    # 4 s sinusoidal lane change at a constant 15 m/s
    plant = PlantSpec("cutin", v_ego0=14.0, v_ch0=15.0, initial_distance=20.0, v_ch_final=15.0,
                      cutin_distance=60.0)
    rec, ledger = _pipeline([plant])
    events = detect_lane_changes(rec)
    assert len(events) == 1
    e, truth = events[0], ledger[0]
    assert e.vehicle_id == truth["challenger_id"]
    assert abs(e.start_frame - truth["start_frame"]) <= 2
    assert abs(e.end_frame - truth["end_frame"]) <= 2
    assert e.start_frame < e.cross_frame <= e.end_frame
    assert (e.source_lane_id, e.target_lane_id) == (2, 1)


def test_lane_keeping_track_has_no_event():
    n = 200
    rec = canonical_recording({1: dict(x=20.0 * np.arange(n) / 25, y=np.full(n, 1.75), vx=20.0)})
    assert detect_lane_changes(rec) == []


def _lane_change_channels(n, changes, fr=25.0, v=20.0, width=3.5):
    """Lateral motion with half-cosine lane changes; changes = [(start_s, duration_s, dy)]."""
    t = np.arange(n) / fr
    y = np.full(n, 1.75)
    vy = np.zeros(n)
    for t0, T, dy in changes:
        u = np.clip((t - t0) / T, 0, 1)
        inside = (t > t0) & (t < t0 + T)
        y = y + dy * 0.5 * (1 - np.cos(math.pi * u))
        vy = vy + np.where(inside, dy * 0.5 * math.pi / T * np.sin(math.pi * u), 0.0)
    return dict(x=v * t, y=y, vx=v, vy=vy)


def test_double_lane_change_gives_two_events():
    ch = _lane_change_channels(500, [(2.0, 4.0, 3.5), (11.0, 4.0, -3.5)])
    events = detect_lane_changes(canonical_recording({1: ch}))
    assert len(events) == 2
    assert (events[0].source_lane_id, events[0].target_lane_id) == (1, 2)
    assert (events[1].source_lane_id, events[1].target_lane_id) == (2, 1)
    assert abs(events[0].start_frame - 50) <= 2 and abs(events[0].end_frame - 150) <= 2
    assert abs(events[1].start_frame - 275) <= 2 and abs(events[1].end_frame - 375) <= 2


def test_two_lane_jump_is_an_anomaly():
    n = 100
    y = np.where(np.arange(n) < 50, 1.75, 8.75)
    anomalies = []
    events = detect_lane_changes(canonical_recording({1: dict(x=np.arange(n), y=y, vx=25.0)}),
                                 anomalies=anomalies)
    assert events == []
    assert len(anomalies) == 1 and anomalies[0].frame == 50


def test_planted_brake():
    plant = PlantSpec("brake", v_ego0=13.0, v_ch0=19.44, initial_distance=40.0, v_ch_final=13.89,
                      brake_duration=4.0)
    rec, ledger = _pipeline([plant])
    events = detect_brake_maneuvers(rec)
    assert len(events) == 1
    e = events[0]
    assert e.vehicle_id == ledger[0]["challenger_id"]
    assert abs((e.end_frame - e.start_frame) - 100) <= 2
    # analytic peak 1.5 * 5.55 / 4 = 2.08125
    assert e.peak_deceleration == pytest.approx(2.08, abs=0.1)
    assert e.v_start == pytest.approx(19.44, abs=0.1) and e.v_end == pytest.approx(13.89, abs=0.1)


def test_coasting_and_constant_speed_have_no_brake():
    n = 200
    t = np.arange(n) / 25
    coasting = dict(x=25 * t - 0.25 * t ** 2, y=np.full(n, 1.75), vx=25 - 0.5 * t, ax=np.full(n, -0.5))
    constant = dict(x=25 * t, y=np.full(n, 5.25), vx=25.0)
    assert detect_brake_maneuvers(canonical_recording({1: coasting, 2: constant})) == []


def _swerve(amplitude, n=400, omega=1.2):
    t = np.arange(n) / 25
    return dict(x=20 * t, y=1.75 + amplitude * np.sin(omega * t), vx=20.0,
                vy=amplitude * omega * np.cos(omega * t), ay=-amplitude * omega ** 2 * np.sin(omega * t))


def test_swerve_detection():
    rec = canonical_recording({1: _swerve(0.7), 2: _swerve(0.5), 3: _swerve(0.0)})
    events = detect_swerving(rec)
    assert [e.vehicle_id for e in events] == [1]
    assert events[0].lateral_range == pytest.approx(1.4, abs=0.05)
    assert events[0].max_lateral_acceleration == pytest.approx(0.7 * 1.44, rel=1e-3)


# -- properties on random synthetic plants ----------------------------------------

brake_plants = st.builds(
    lambda v_ch0, dv, T, D: PlantSpec("brake", v_ego0=v_ch0 - dv - 0.5, v_ch0=v_ch0,
                                      initial_distance=D, v_ch_final=v_ch0 - dv, brake_duration=T),
    v_ch0=st.floats(14.0, 30.0), dv=st.floats(3.0, 8.0), T=st.floats(1.5, 4.0),
    D=st.floats(15.0, 60.0),
)


@settings(max_examples=25, deadline=None)
@given(plants=st.lists(brake_plants, min_size=1, max_size=3),
       peak=st.floats(0.5, 6.0), shift=st.integers(0, 5000))
def test_brake_event_properties(plants, peak, shift):
    rec, _ = _pipeline(plants)
    config = DetectionConfig(brake_peak_threshold=peak)
    events = detect_brake_maneuvers(rec, config)
    by_vehicle = {}
    for e in events:
        track = rec.tracks[e.vehicle_id]
        lo, hi = track.index(e.start_frame), track.index(e.end_frame)
        assert e.end_frame > e.start_frame and e.v_end < e.v_start
        assert np.max(-track.ax[lo:hi + 1]) >= peak
        assert e.peak_deceleration >= peak
        prev = by_vehicle.get(e.vehicle_id)
        assert prev is None or prev < e.start_frame
        by_vehicle[e.vehicle_id] = e.end_frame

    # raising the peak threshold never adds events
    stricter = detect_brake_maneuvers(rec, replace(config, brake_peak_threshold=peak + 0.5))
    assert len(stricter) <= len(events)

    # shifting every frame shifts every event
    shifted = Recording(rec.meta, rec.vehicles, {
        vid: Track(vid, t.frames + shift, t.x, t.y, t.vx, t.vy, t.ax, t.ay, t.lane_id, t.dhw,
                   t.thw, t.neighbors, t.lane_offset)
        for vid, t in rec.tracks.items()}, canonical=True)
    moved = detect_brake_maneuvers(shifted, config)
    assert [(e.start_frame - shift, e.end_frame - shift) for e in moved] == \
        [(e.start_frame, e.end_frame) for e in events]


@settings(max_examples=20, deadline=None)
@given(dy=st.sampled_from([3.5, -3.5]), T=st.floats(2.5, 7.0), gap=st.floats(3.0, 10.0))
def test_lane_change_properties(dy, T, gap):
    ch = _lane_change_channels(int((2 + T + gap + T + 2) * 25), [(2.0, T, dy), (2.0 + T + gap, T, -dy)])
    ch["y"] = ch["y"] + (3.5 if dy < 0 else 0.0)
    events = detect_lane_changes(canonical_recording({1: ch}))
    assert len(events) == 2
    assert events[0].end_frame < events[1].start_frame
    for e in events:
        assert e.start_frame < e.cross_frame <= e.end_frame
        assert abs(e.source_lane_id - e.target_lane_id) == 1
