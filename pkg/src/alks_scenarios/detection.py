"""Primitive event detection on canonical tracks.

Every detector walks each track independently and returns events sorted by
``(vehicle_id, start_frame)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .ingest import Recording, Track

logger = logging.getLogger(__name__)

# a sample only extends a maneuver edge if it is smaller by more than this
_REFINE_EPS = 1e-6


@dataclass(frozen=True)
class DetectionConfig:
    brake_peak_threshold: float = 2.0
    brake_edge_threshold: float = 0.2
    lc_lateral_velocity_threshold: float = 0.2
    swerve_range_threshold: float = 1.2

    def __post_init__(self):
        for name in ("brake_peak_threshold", "brake_edge_threshold",
                     "lc_lateral_velocity_threshold", "swerve_range_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.brake_edge_threshold < self.brake_peak_threshold:
            raise ValueError("brake_edge_threshold must be below brake_peak_threshold")


@dataclass(frozen=True)
class LaneChangeEvent:
    vehicle_id: int
    start_frame: int
    cross_frame: int
    end_frame: int
    source_lane_id: int
    target_lane_id: int


@dataclass(frozen=True)
class LaneChangeAnomaly:
    vehicle_id: int
    frame: int
    source_lane_id: int
    target_lane_id: int


@dataclass(frozen=True)
class BrakeEvent:
    vehicle_id: int
    start_frame: int
    end_frame: int
    peak_deceleration: float
    v_start: float
    v_end: float


@dataclass(frozen=True)
class SwerveEvent:
    vehicle_id: int
    start_frame: int
    end_frame: int
    lateral_range: float
    max_lateral_acceleration: float


def _extend_back(signal: np.ndarray, i: int, floor: int) -> int:
    # walk back while the magnitude keeps falling towards zero
    while i > floor and 0.0 <= signal[i - 1] < signal[i] - _REFINE_EPS:
        i -= 1
    return i


def _extend_forward(signal: np.ndarray, i: int, ceiling: int) -> int:
    while i < ceiling and 0.0 <= signal[i + 1] < signal[i] - _REFINE_EPS:
        i += 1
    return i


def _track_lane_changes(track: Track, threshold: float, anomalies: Optional[list]):
    lanes = track.lane_id
    vy = track.vy
    last = len(track) - 1
    events = []
    floor = 0
    for i in np.flatnonzero(np.diff(lanes)) + 1:
        source, target = int(lanes[i - 1]), int(lanes[i])
        if abs(target - source) != 1:
            if anomalies is not None:
                anomalies.append(LaneChangeAnomaly(track.vehicle_id, int(track.frames[i]),
                                                   source, target))
            logger.info("vehicle %s: lane jump %s -> %s at frame %s", track.vehicle_id,
                        source, target, track.frames[i])
            floor = i
            continue
        toward = vy * np.sign(target - source)

        start = i - 1
        while start > floor and toward[start] >= threshold:
            start -= 1
        start = _extend_back(toward, start, floor)

        end = i
        while end < last and abs(vy[end]) >= threshold:
            end += 1
        end = _extend_forward(toward, end, last)

        events.append(LaneChangeEvent(
            vehicle_id=track.vehicle_id,
            start_frame=int(track.frames[start]),
            cross_frame=int(track.frames[i]),
            end_frame=int(track.frames[end]),
            source_lane_id=source,
            target_lane_id=target,
        ))
        floor = min(end + 1, last)
    return events


def detect_lane_changes(recording: Recording, config: DetectionConfig = DetectionConfig(),
                        anomalies: Optional[list] = None) -> List[LaneChangeEvent]:
    """One event per single-lane ``lane_id`` transition.

    The start is found by walking back from the crossing until the lateral
    speed towards the target lane drops below the threshold, then further back
    while it keeps decreasing (the onset of the lateral motion).  The end is
    located symmetrically after the crossing.  Jumps over two or more lanes
    are appended to ``anomalies`` instead.
    """
    events = []
    for vid in sorted(recording.tracks):
        events.extend(_track_lane_changes(recording.tracks[vid],
                                          config.lc_lateral_velocity_threshold, anomalies))
    return events


def _track_brakes(track: Track, config: DetectionConfig):
    decel = -track.ax
    below = decel >= config.brake_edge_threshold
    if not below.any():
        return []
    padded = np.concatenate(([False], below, [False])).astype(np.int8)
    changes = np.diff(padded)
    starts = np.flatnonzero(changes == 1)
    ends = np.flatnonzero(changes == -1) - 1
    last = len(track) - 1
    events = []
    floor = 0
    for lo, hi in zip(starts, ends):
        peak = float(decel[lo:hi + 1].max())
        if peak < config.brake_peak_threshold:
            continue
        # the edge threshold cuts off the flanks; extend to the onset/offset
        lo = _extend_back(decel, int(lo), floor)
        ceiling = int(starts[starts > hi][0]) - 1 if np.any(starts > hi) else last
        hi = _extend_forward(decel, int(hi), ceiling)
        v_start, v_end = float(track.vx[lo]), float(track.vx[hi])
        if not v_end < v_start:
            continue
        events.append(BrakeEvent(
            vehicle_id=track.vehicle_id,
            start_frame=int(track.frames[lo]),
            end_frame=int(track.frames[hi]),
            peak_deceleration=peak,
            v_start=v_start,
            v_end=v_end,
        ))
        floor = hi + 1
    return events


def detect_brake_maneuvers(recording: Recording,
                           config: DetectionConfig = DetectionConfig()) -> List[BrakeEvent]:
    """Deceleration phases whose peak reaches ``brake_peak_threshold``.

    Phases are the maximal runs with ``ax <= -brake_edge_threshold``, widened
    outwards while the deceleration keeps decreasing so that the flanks of a
    smooth speed change are part of the event.
    """
    events = []
    for vid in sorted(recording.tracks):
        events.extend(_track_brakes(recording.tracks[vid], config))
    return events


def detect_swerving(recording: Recording,
                    config: DetectionConfig = DetectionConfig()) -> List[SwerveEvent]:
    """Tracks that stay in one lane while their lateral position varies enough.

    The whole visible track is evaluated, so the range is a lower bound of
    the true one.
    """
    events = []
    for vid in sorted(recording.tracks):
        track = recording.tracks[vid]
        if np.any(track.lane_id != track.lane_id[0]):
            continue
        lateral_range = float(np.ptp(track.y))
        if lateral_range < config.swerve_range_threshold:
            continue
        events.append(SwerveEvent(
            vehicle_id=vid,
            start_frame=track.first_frame,
            end_frame=track.last_frame,
            lateral_range=lateral_range,
            max_lateral_acceleration=float(np.max(np.abs(track.ay))),
        ))
    return events
