"""Turning detected events into concrete, parameterized scenarios."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, fields
from typing import ClassVar, List, Optional, Sequence, Union

import numpy as np

from .detection import BrakeEvent, LaneChangeEvent, SwerveEvent
from .ingest import Recording, Track

KMH = 3.6
CUTIN_REDEPARTURE_WINDOW = 1.0  # s after the lane change end
SWERVE_MIN_OVERLAP = 3.0  # s


@dataclass(frozen=True)
class _ScenarioBase:
    recording_id: int
    ego_id: int
    challenger_id: int
    start_frame: int
    end_frame: int
    v_ego0: float
    v_ch0: float
    initial_distance: float
    lane_id: int  # canonical lane of the ego at start_frame
    driving_direction: int
    lane_widths: tuple  # from the rightmost lane leftwards
    ego_length: float
    ego_width: float
    ego_class: str
    ch_length: float
    ch_width: float
    ch_class: str
    speed_limit: Optional[float]

    kind: ClassVar[str] = ""

    def __post_init__(self):
        object.__setattr__(self, "lane_widths", tuple(float(w) for w in self.lane_widths))
        if not 1 <= self.lane_id <= len(self.lane_widths):
            raise ValueError(f"lane {self.lane_id} not on a road with {len(self.lane_widths)} lanes")

    @property
    def trigger_distance(self) -> float:
        return self.initial_distance

    @property
    def key(self):
        return (self.recording_id, self.start_frame, self.challenger_id)

    def lane_center(self, lane: int) -> float:
        """Lateral position of a lane center measured from the right road edge."""
        widths = self.lane_widths
        return float(sum(widths[: lane - 1]) + 0.5 * widths[lane - 1])

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


@dataclass(frozen=True)
class BrakeScenario(_ScenarioBase):
    brake_duration: float = 0.0
    v_ch_final: float = 0.0
    peak_deceleration: float = 0.0

    kind: ClassVar[str] = "brake"

    def __post_init__(self):
        super().__post_init__()
        if not self.initial_distance > 0:
            raise ValueError("initial_distance must be positive")
        if not self.brake_duration > 0:
            raise ValueError("brake_duration must be positive")
        if not self.v_ch_final < self.v_ch0:
            raise ValueError("v_ch_final must be below v_ch0")


@dataclass(frozen=True)
class CutInScenario(_ScenarioBase):
    relative_lane: int = 1  # +1: challenger starts one lane left of the ego
    initial_lane_offset: float = 0.0
    cutin_distance: float = 0.0
    v_ch_final: float = 0.0
    final_lane_offset: float = 0.0
    thw0: float = 0.0

    kind: ClassVar[str] = "cutin"

    def __post_init__(self):
        super().__post_init__()
        if self.relative_lane not in (-1, 1):
            raise ValueError(f"relative_lane must be -1 or +1, got {self.relative_lane}")
        if not 1 <= self.source_lane <= len(self.lane_widths):
            raise ValueError("challenger source lane is not on the road")
        if not self.cutin_distance > 0:
            raise ValueError("cutin_distance must be positive")
        if not self.initial_distance > 0:
            raise ValueError("challenger must be ahead of the ego at maneuver start")

    @property
    def source_lane(self) -> int:
        return self.lane_id + self.relative_lane


@dataclass(frozen=True)
class SwerveScenario(_ScenarioBase):
    relation: str = "Lead"  # or "Side"
    relative_lane: int = 0  # lane of the challenger relative to the ego
    lateral_range: float = 0.0
    max_lateral_acceleration: float = 0.0

    kind: ClassVar[str] = "swerve"

    def __post_init__(self):
        super().__post_init__()
        if self.relation not in ("Lead", "Side"):
            raise ValueError(f"relation must be Lead or Side, got {self.relation}")
        expected = (0,) if self.relation == "Lead" else (-1, 1)
        if self.relative_lane not in expected:
            raise ValueError(f"relative_lane {self.relative_lane} does not match {self.relation}")
        if self.lateral_range < 0:
            raise ValueError("lateral_range must be non-negative")


ScenarioRecord = Union[BrakeScenario, CutInScenario, SwerveScenario]
SCENARIO_TYPES = {cls.kind: cls for cls in (BrakeScenario, CutInScenario, SwerveScenario)}


@dataclass(frozen=True)
class OddConfig:
    max_ego_velocity: float = 70.0  # km/h
    min_peak_deceleration: float = 2.0
    min_swerve_range: float = 1.2
    max_cutin_thw: Optional[float] = None  # optional criticality ceiling, s

    def __post_init__(self):
        for name in ("max_ego_velocity", "min_peak_deceleration", "min_swerve_range"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_cutin_thw is not None and not self.max_cutin_thw > 0:
            raise ValueError("max_cutin_thw must be positive")


def compute_thw(gap: float, ego_velocity: float) -> float:
    if not ego_velocity > 0:
        raise ValueError(f"time headway needs a positive ego velocity, got {ego_velocity}")
    return gap / ego_velocity


# -- helpers -------------------------------------------------------------------


def _bumper_gap(recording: Recording, leader: int, follower: int, frame: int) -> float:
    lead, follow = recording.tracks[leader], recording.tracks[follower]
    x_rear = lead.x[lead.index(frame)] - recording.vehicles[leader].length / 2.0
    x_front = follow.x[follow.index(frame)] + recording.vehicles[follower].length / 2.0
    return float(x_rear - x_front)


def _common(recording: Recording, ego: int, challenger: int, start: int, end: int,
            lane: int) -> dict:
    ego_meta = recording.vehicles[ego]
    ch_meta = recording.vehicles[challenger]
    ego_track = recording.tracks[ego]
    ch_track = recording.tracks[challenger]
    direction = ch_meta.driving_direction
    return dict(
        recording_id=recording.meta.recording_id,
        ego_id=ego,
        challenger_id=challenger,
        start_frame=start,
        end_frame=end,
        v_ego0=float(ego_track.vx[ego_track.index(start)]),
        v_ch0=float(ch_track.vx[ch_track.index(start)]),
        initial_distance=_bumper_gap(recording, challenger, ego, start),
        lane_id=lane,
        driving_direction=direction,
        lane_widths=tuple(recording.meta.lane_widths(direction)),
        ego_length=ego_meta.length,
        ego_width=ego_meta.width,
        ego_class=ego_meta.vehicle_class,
        ch_length=ch_meta.length,
        ch_width=ch_meta.width,
        ch_class=ch_meta.vehicle_class,
        speed_limit=recording.meta.speed_limit,
    )


def _lane_constant(track: Track, start: int, end: int, lane: int) -> bool:
    lanes = track.lane_id[track.index(start):track.index(end) + 1]
    return bool(np.all(lanes == lane))


def _skip(skips: Optional[Counter], reason: str):
    if skips is not None:
        skips[reason] += 1


def _require_canonical(recording: Recording):
    if not recording.canonical:
        raise ValueError("recording must be canonicalized first")


def _sorted(scenarios):
    return sorted(scenarios, key=lambda s: s.key)


# -- builders ------------------------------------------------------------------


def build_brake_scenarios(recording: Recording, brake_events: Sequence[BrakeEvent],
                          skips: Optional[Counter] = None) -> List[BrakeScenario]:
    """Pair each braking vehicle with its same-lane follower at maneuver start.

    Skipped events are tallied in ``skips`` by reason.
    """
    _require_canonical(recording)
    fr = recording.meta.frame_rate
    out = []
    for event in brake_events:
        ch = recording.tracks[event.vehicle_id]
        start, end = event.start_frame, event.end_frame
        if not (ch.first_frame < start and end < ch.last_frame):
            _skip(skips, "brake: not completed within measurement area")
            continue
        i = ch.index(start)
        ego_id = int(ch.neighbors["following"][i])
        if ego_id <= 0 or ego_id not in recording.tracks:
            _skip(skips, "brake: no follower")
            continue
        ego = recording.tracks[ego_id]
        lane = int(ch.lane_id[i])
        if not ego.covers(start, end):
            _skip(skips, "brake: ego not visible during maneuver")
            continue
        if not _lane_constant(ego, start, end, lane):
            _skip(skips, "brake: ego leaves the lane")
            continue
        params = _common(recording, ego_id, event.vehicle_id, start, end, lane)
        if params["initial_distance"] <= 0:
            _skip(skips, "brake: non-positive gap")
            continue
        v_final = float(ch.vx[ch.index(end)])
        if not v_final < params["v_ch0"]:
            _skip(skips, "brake: no net speed reduction")
            continue
        out.append(BrakeScenario(
            **params,
            brake_duration=(end - start) / fr,
            v_ch_final=v_final,
            peak_deceleration=event.peak_deceleration,
        ))
    return _sorted(out)


def build_cutin_scenarios(recording: Recording, lane_changes: Sequence[LaneChangeEvent],
                          skips: Optional[Counter] = None) -> List[CutInScenario]:
    """Pair each lane change with the vehicle it cuts in front of.

    The ego is the challenger's follower in the target lane at the crossing
    frame.
    """
    _require_canonical(recording)
    fr = recording.meta.frame_rate
    window = int(round(CUTIN_REDEPARTURE_WINDOW * fr))
    out = []
    for event in lane_changes:
        ch = recording.tracks[event.vehicle_id]
        start, end = event.start_frame, event.end_frame
        if not (ch.first_frame < start and end < ch.last_frame):
            _skip(skips, "cutin: not completed within measurement area")
            continue
        target = event.target_lane_id
        check_end = min(end + window, ch.last_frame)
        if not _lane_constant(ch, event.cross_frame, check_end, target):
            _skip(skips, "cutin: canceled or double lane change")
            continue
        ego_id = int(ch.neighbors["following"][ch.index(event.cross_frame)])
        if ego_id <= 0 or ego_id not in recording.tracks:
            _skip(skips, "cutin: no follower in target lane")
            continue
        ego = recording.tracks[ego_id]
        if not ego.covers(start, end):
            _skip(skips, "cutin: ego not visible during maneuver")
            continue
        if not _lane_constant(ego, start, end, target):
            _skip(skips, "cutin: ego leaves the lane")
            continue
        if int(ch.lane_id[ch.index(start)]) != event.source_lane_id:
            _skip(skips, "cutin: challenger not in source lane at start")
            continue
        params = _common(recording, ego_id, event.vehicle_id, start, end, target)
        if params["initial_distance"] <= 0:
            _skip(skips, "cutin: challenger not ahead of ego")
            continue
        if not params["v_ego0"] > 0:
            _skip(skips, "cutin: ego standing still")
            continue
        i0, i1 = ch.index(start), ch.index(end)
        out.append(CutInScenario(
            **params,
            relative_lane=event.source_lane_id - target,
            initial_lane_offset=float(ch.lane_offset[i0]),
            cutin_distance=float(ch.x[i1] - ch.x[i0]),
            v_ch_final=float(ch.vx[i1]),
            final_lane_offset=float(ch.lane_offset[i1]),
            thw0=compute_thw(params["initial_distance"], params["v_ego0"]),
        ))
    return _sorted(out)


_SIDE_KEYS = {"left_following": -1, "right_following": 1}


def build_swerve_scenarios(recording: Recording, swerves: Sequence[SwerveEvent],
                           skips: Optional[Counter] = None) -> List[SwerveScenario]:
    """One scenario per vehicle that follows the swerving vehicle long enough.

    Same-lane followers give ``Lead`` scenarios, followers in an adjacent lane
    ``Side`` ones; the relation must hold for at least three seconds.
    """
    _require_canonical(recording)
    fr = recording.meta.frame_rate
    min_frames = int(np.ceil(SWERVE_MIN_OVERLAP * fr - 1e-9))
    out = []
    for event in swerves:
        ch = recording.tracks[event.vehicle_id]
        lo, hi = ch.index(event.start_frame), ch.index(event.end_frame) + 1
        candidates = [("following", "Lead", 0)] + [(k, "Side", rel) for k, rel in _SIDE_KEYS.items()]
        found = 0
        for key, relation, rel in candidates:
            ids = ch.neighbors[key][lo:hi]
            for ego_id in np.unique(ids[ids > 0]):
                ego_id = int(ego_id)
                hits = np.flatnonzero(ids == ego_id)
                if len(hits) < min_frames or ego_id not in recording.tracks:
                    continue
                start = int(ch.frames[lo + hits[0]])
                end = int(ch.frames[lo + hits[-1]])
                ego = recording.tracks[ego_id]
                if not ego.covers(start, start):
                    continue
                lane = int(ego.lane_id[ego.index(start)])
                params = _common(recording, ego_id, event.vehicle_id, start, end, lane)
                if relation == "Side" and params["initial_distance"] <= 0:
                    _skip(skips, "swerve: side vehicle not behind challenger")
                    continue
                out.append(SwerveScenario(
                    **params,
                    relation=relation,
                    relative_lane=rel,
                    lateral_range=event.lateral_range,
                    max_lateral_acceleration=event.max_lateral_acceleration,
                ))
                found += 1
        if not found:
            _skip(skips, "swerve: no follower")
    return _sorted(out)


def filter_odd(scenarios: Sequence[ScenarioRecord], odd: OddConfig = OddConfig()) -> List[ScenarioRecord]:
    """Keep the scenarios inside the operational design domain, order preserved."""
    v_max = odd.max_ego_velocity / KMH
    kept = []
    for s in scenarios:
        if s.v_ego0 > v_max + 1e-9:
            continue
        if isinstance(s, BrakeScenario) and s.peak_deceleration < odd.min_peak_deceleration:
            continue
        if isinstance(s, SwerveScenario) and s.lateral_range < odd.min_swerve_range:
            continue
        if (isinstance(s, CutInScenario) and odd.max_cutin_thw is not None
                and s.thw0 > odd.max_cutin_thw):
            continue
        kept.append(s)
    return kept
