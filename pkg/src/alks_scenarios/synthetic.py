"""Synthetic highD-format recordings with planted scenarios of known parameters.

Each plant is a small group of vehicles (ego, challenger and optional
background traffic) whose motion follows the closed-form maneuver models
exactly.  Derivative channels are analytic.  Plants are laid out one after
another in time so they never interact.

Randomness (noise, free background speeds) comes from numpy's PCG64 generator
seeded by the caller, so the same seed yields byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ingest import (
    NEIGHBOR_COLUMNS,
    Recording,
    RecordingMeta,
    Track,
    VehicleMeta,
)
from .maneuvers import lane_change_duration

PRE_ROLL = 2.0  # s the ego is visible before the maneuver starts
POST_ROLL = 1.5  # s the challenger must stay visible after the maneuver ends
PLANT_SPACING = 1.0  # s between consecutive plant windows
_HORIZON = 120.0  # s of local time simulated on each side of the maneuver start


@dataclass
class PlantSpec:
    """One scenario to plant; fields not used by ``kind`` are ignored."""

    kind: str  # "brake", "cutin" or "swerve"
    v_ego0: float
    v_ch0: float
    initial_distance: float
    v_ch_final: Optional[float] = None
    brake_duration: Optional[float] = None
    relative_lane: int = 1
    initial_lane_offset: float = 0.0
    cutin_distance: Optional[float] = None
    final_lane_offset: float = 0.0
    lateral_range: Optional[float] = None
    max_lateral_acceleration: Optional[float] = None
    ego_lane: int = 1
    direction: int = 2
    background: int = 0
    noise: float = 0.0
    start_time: Optional[float] = None  # recording time of maneuver start
    ego_length: float = 4.5
    ego_width: float = 1.8
    ego_class: str = "Car"
    ch_length: float = 4.5
    ch_width: float = 1.8
    ch_class: str = "Car"

    def __post_init__(self):
        if self.kind not in ("brake", "cutin", "swerve"):
            raise ValueError(f"unknown plant kind {self.kind!r}")
        if not self.initial_distance > 0:
            raise ValueError("initial_distance must be positive")
        if self.v_ego0 <= 0 or self.v_ch0 <= 0:
            raise ValueError("plant speeds must be positive")
        if self.kind == "brake":
            if self.brake_duration is None or not self.brake_duration > 0:
                raise ValueError("brake plant needs a positive brake_duration")
            if self.v_ch_final is None or not 0 < self.v_ch_final < self.v_ch0:
                raise ValueError("brake plant needs 0 < v_ch_final < v_ch0")
        elif self.kind == "cutin":
            if self.relative_lane not in (-1, 1):
                raise ValueError("cut-in relative_lane must be -1 or +1")
            if self.cutin_distance is None or not self.cutin_distance > 0:
                raise ValueError("cut-in plant needs a positive cutin_distance")
            if self.v_ch_final is None or not self.v_ch_final > 0:
                raise ValueError("cut-in plant needs a positive v_ch_final")
        else:
            if self.relative_lane not in (-1, 0, 1):
                raise ValueError("swerve relative_lane must be -1, 0 or +1")
            if not (self.lateral_range and self.lateral_range > 0):
                raise ValueError("swerve plant needs a positive lateral_range")
            if not (self.max_lateral_acceleration and self.max_lateral_acceleration > 0):
                raise ValueError("swerve plant needs a positive max_lateral_acceleration")
        if self.noise < 0:
            raise ValueError("noise amplitude must be non-negative")

    @property
    def challenger_lane(self) -> int:
        if self.kind == "brake":
            return self.ego_lane
        return self.ego_lane + self.relative_lane

    @property
    def maneuver_duration(self) -> float:
        if self.kind == "brake":
            return self.brake_duration
        if self.kind == "cutin":
            return lane_change_duration(self.cutin_distance, self.v_ch0, self.v_ch_final)
        return 0.0


def default_meta(recording_id: int = 1, frame_rate: float = 25.0, lanes: int = 3,
                 lane_width: float = 3.5, area_length: float = 420.0,
                 speed_limit: Optional[float] = None) -> RecordingMeta:
    """Straight road with ``lanes`` equal lanes per direction and a median."""
    upper = 8.0 + lane_width * np.arange(lanes + 1)
    lower = upper[-1] + 3.0 + lane_width * np.arange(lanes + 1)
    return RecordingMeta(recording_id, frame_rate, tuple(np.round(upper, 6)),
                         tuple(np.round(lower, 6)), area_length, speed_limit)


# -- motion primitives (vectorized over local time) ----------------------------


def _cubic_motion(tau, v0, vf, T):
    """Distance, speed and acceleration of a cubic speed change starting at 0."""
    u = np.clip(tau / T, 0.0, 1.0)
    dv = vf - v0
    v = v0 + dv * u * u * (3.0 - 2.0 * u)
    a = np.where((tau > 0) & (tau < T), dv * 6.0 * u * (1.0 - u) / T, 0.0)
    inside = T * (v0 * u + dv * (u ** 3 - 0.5 * u ** 4))
    dist = np.where(tau < 0, v0 * tau,
                    np.where(tau > T, T * (v0 + 0.5 * dv) + vf * (tau - T), inside))
    return dist, v, a


@dataclass
class _Motion:
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    ax: np.ndarray
    ay: np.ndarray


def _constant(tau, x0, y0, v):
    n = len(tau)
    return _Motion(x0 + v * tau, np.full(n, y0), np.full(n, float(v)), np.zeros(n),
                   np.zeros(n), np.zeros(n))


def _brake_motion(tau, x0, y0, plant: PlantSpec):
    dist, v, a = _cubic_motion(tau, plant.v_ch0, plant.v_ch_final, plant.brake_duration)
    n = len(tau)
    return _Motion(x0 + dist, np.full(n, y0), v, np.zeros(n), a, np.zeros(n))


def _cutin_motion(tau, x0, y0, y1, plant: PlantSpec):
    T = plant.maneuver_duration
    S = plant.cutin_distance
    dist, v, a = _cubic_motion(tau, plant.v_ch0, plant.v_ch_final, T)
    inside = (tau > 0) & (tau < T)
    k = math.pi / S
    phase = np.clip(dist, 0.0, S) * k
    half = 0.5 * (y1 - y0)
    y = np.where(tau <= 0, y0, np.where(tau >= T, y1, y0 + half * (1.0 - np.cos(phase))))
    slope = np.where(inside, half * k * np.sin(phase), 0.0)
    curv = np.where(inside, half * k * k * np.cos(phase), 0.0)
    return _Motion(x0 + dist, y, v, slope * v, a, curv * v * v + slope * a)


def _swerve_motion(tau, x0, y0, plant: PlantSpec):
    amplitude = plant.lateral_range / 2.0
    omega = math.sqrt(plant.max_lateral_acceleration / amplitude)
    n = len(tau)
    s = np.sin(omega * tau)
    return _Motion(x0 + plant.v_ch0 * tau, y0 + amplitude * s, np.full(n, float(plant.v_ch0)),
                   amplitude * omega * np.cos(omega * tau), np.zeros(n),
                   -amplitude * omega * omega * s)


# -- plant layout --------------------------------------------------------------


@dataclass
class _Vehicle:
    vid: int
    meta: VehicleMeta
    frames: np.ndarray
    motion: _Motion
    noise: float = 0.0
    lanes: np.ndarray = None
    neighbors: dict = None
    dhw: np.ndarray = None
    thw: np.ndarray = None


def _visible(motion: _Motion, length: float, area: float) -> np.ndarray:
    return (motion.x - length / 2.0 >= 0.0) & (motion.x + length / 2.0 <= area)


def _span(mask: np.ndarray) -> Tuple[int, int]:
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        return None
    if np.any(np.diff(idx) != 1):
        raise ValueError("vehicle leaves and re-enters the measurement area")
    return int(idx[0]), int(idx[-1])


def _plant_vehicles(plant: PlantSpec, meta: RecordingMeta, tau: np.ndarray):
    """Motions (over local time ``tau``) of the vehicles of one plant."""
    direction = plant.direction
    marks = meta.markings(direction)
    n_lanes = len(marks) - 1
    centers = 0.5 * (marks[:-1] + marks[1:])
    widths = np.diff(marks)
    ch_lane = plant.challenger_lane
    for lane in (plant.ego_lane, ch_lane):
        if not 1 <= lane <= n_lanes:
            raise ValueError(f"lane {lane} does not exist on a {n_lanes}-lane road")

    if plant.kind == "swerve":
        x_e0 = plant.ego_length / 2.0 + 1.0
        if plant.lateral_range / 2.0 >= widths[ch_lane - 1] / 2.0:
            raise ValueError("swerve amplitude leaves the lane")
    else:
        x_e0 = plant.ego_length / 2.0 + 1.0 + plant.v_ego0 * PRE_ROLL
    x_c0 = x_e0 + plant.ego_length / 2.0 + plant.initial_distance + plant.ch_length / 2.0

    ego = _constant(tau, x_e0, centers[plant.ego_lane - 1], plant.v_ego0)
    y_ch0 = centers[ch_lane - 1]
    if plant.kind == "brake":
        ch = _brake_motion(tau, x_c0, y_ch0, plant)
    elif plant.kind == "cutin":
        y0 = centers[ch_lane - 1] + plant.initial_lane_offset
        y1 = centers[plant.ego_lane - 1] + plant.final_lane_offset
        ch = _cutin_motion(tau, x_c0, y0, y1, plant)
    else:
        ch = _swerve_motion(tau, x_c0, y_ch0, plant)

    group = [("ego", plant.ego_length, plant.ego_width, plant.ego_class, ego, 0.0),
             ("challenger", plant.ch_length, plant.ch_width, plant.ch_class, ch, plant.noise)]

    used = {plant.ego_lane, ch_lane}
    if plant.kind == "swerve":
        used |= {ch_lane - 1, ch_lane + 1}
    free = [lane for lane in range(1, n_lanes + 1) if lane not in used]
    if plant.background and not free:
        raise ValueError("no free lane for background traffic")
    for j in range(plant.background):
        lane = free[j % len(free)]
        x0 = x_e0 + 25.0 * (j // len(free))
        group.append(("background", 4.5, 1.8, "Car",
                      _constant(tau, x0, centers[lane - 1], plant.v_ego0), plant.noise))
    return group


def _check_plant(plant: PlantSpec, group, tau, meta: RecordingMeta, fr: float):
    area = meta.measurement_area_length
    (_, le, _, _, ego, _), (_, lc, _, _, ch, _) = group[:2]
    vis_e, vis_c = _visible(ego, le, area), _visible(ch, lc, area)
    both = vis_e & vis_c
    gap = (ch.x - lc / 2.0) - (ego.x + le / 2.0)
    if np.any(gap[both] <= 0):
        raise ValueError("plant vehicles would collide or change order")
    if np.any(ego.vx <= 0) or np.any(ch.vx <= 0):
        raise ValueError("plant speeds must stay positive")
    if plant.kind == "swerve":
        if both.sum() < 3.5 * fr:
            raise ValueError("swerve plant: ego and challenger overlap for less than 3.5 s")
        return
    T = plant.maneuver_duration
    needed = (tau >= -1.0 / fr) & (tau <= T + POST_ROLL)
    if not np.all(vis_c[needed]):
        raise ValueError("plant parameters cannot fit inside the measurement area")
    if not np.all(vis_e[(tau >= -1.0 / fr) & (tau <= T + 1.0 / fr)]):
        raise ValueError("ego not visible for the whole maneuver")


def _neighbors(vehicles: List[_Vehicle]):
    """highD-style neighbor ids, dhw and thw from the clean positions."""
    rows = []
    for k, veh in enumerate(vehicles):
        m = len(veh.frames)
        rows.append(np.column_stack([
            np.full(m, k), veh.frames, np.full(m, veh.meta.driving_direction),
            veh.motion.x, veh.lanes, np.full(m, veh.meta.length), np.arange(m),
        ]))
    out = {k: {key: np.zeros(len(v.frames), dtype=np.int64) for key in NEIGHBOR_COLUMNS}
           for k, v in enumerate(vehicles)}
    dhw = {k: np.zeros(len(v.frames)) for k, v in enumerate(vehicles)}
    thw = {k: np.zeros(len(v.frames)) for k, v in enumerate(vehicles)}
    if not rows:
        return out, dhw, thw
    table = np.concatenate(rows)
    order = np.lexsort((table[:, 3], table[:, 2], table[:, 1]))
    table = table[order]
    keys = table[:, 1] * 3 + table[:, 2]
    splits = np.flatnonzero(np.diff(keys)) + 1
    for group in np.split(table, splits):
        if len(group) < 2:
            continue
        for a in group:
            ka, ia = int(a[0]), int(a[6])
            xa, lane_a, len_a = a[3], a[4], a[5]
            best = {}
            for b in group:
                kb = int(b[0])
                if kb == ka:
                    continue
                dx = b[3] - xa
                side = b[4] - lane_a
                if side == 0:
                    key = "preceding" if dx > 0 else "following"
                elif abs(side) == 1:
                    prefix = "left" if side > 0 else "right"
                    if abs(dx) < 0.5 * (len_a + b[5]):
                        key = f"{prefix}_alongside"
                    else:
                        key = f"{prefix}_{'preceding' if dx > 0 else 'following'}"
                else:
                    continue
                if key not in best or abs(dx) < best[key][0]:
                    best[key] = (abs(dx), kb, b)
            for key, (_, kb, b) in best.items():
                out[ka][key][ia] = vehicles[kb].vid
            if "preceding" in best:
                b = best["preceding"][2]
                gap = (b[3] - b[5] / 2.0) - (xa + len_a / 2.0)
                dhw[ka][ia] = gap
                v = vehicles[ka].motion.vx[ia]
                thw[ka][ia] = gap / v if v > 0 else 0.0
    return out, dhw, thw


def _raw_lane_ids(lanes: np.ndarray, meta: RecordingMeta, direction: int) -> np.ndarray:
    if direction == 1:
        return lanes + 1
    return len(meta.upper_lane_markings) + 1 + len(meta.lower_lane_markings) - lanes


def _to_raw(veh: _Vehicle, meta: RecordingMeta) -> Track:
    m = veh.motion
    L, W = veh.meta.length, veh.meta.width
    if veh.meta.driving_direction == 1:
        x = meta.measurement_area_length - m.x - L / 2.0
        y = m.y - W / 2.0
        vx, vy, ax, ay = -m.vx, m.vy, -m.ax, m.ay
    else:
        x = m.x - L / 2.0
        y = -m.y - W / 2.0
        vx, vy, ax, ay = m.vx, -m.vy, m.ax, -m.ay
    return Track(
        vehicle_id=veh.vid, frames=veh.frames, x=x, y=y, vx=vx, vy=vy, ax=ax, ay=ay,
        lane_id=_raw_lane_ids(veh.lanes, meta, veh.meta.driving_direction),
        dhw=veh.dhw, thw=veh.thw, neighbors=veh.neighbors,
    )


def synthesize_recording(plants: Sequence[PlantSpec], meta: Optional[RecordingMeta] = None,
                         seed: int = 0, background: int = 0,
                         background_direction: int = 1) -> Tuple[Recording, List[dict]]:
    """Build a raw (not yet canonical) recording realizing ``plants``.

    ``background`` adds free-flowing constant-speed vehicles in
    ``background_direction`` that take part in no scenario.  Returns the
    recording and a ledger with one entry per plant holding the parameters
    extraction is expected to recover.
    """
    meta = meta or default_meta()
    rng = np.random.default_rng(seed)
    fr = meta.frame_rate
    area = meta.measurement_area_length
    steps = int(round(_HORIZON * fr))
    local = np.arange(-steps, steps + 1)
    tau = local / fr

    vehicles: List[_Vehicle] = []
    ledger = []
    windows: Dict[int, List[Tuple[int, int, int]]] = {1: [], 2: []}
    cursor = 0
    next_id = 1
    for index, plant in enumerate(plants):
        group = _plant_vehicles(plant, meta, tau)
        _check_plant(plant, group, tau, meta, fr)
        spans = [_span(_visible(motion, length, area)) for _, length, _, _, motion, _ in group]
        if any(s is None for s in spans):
            raise ValueError(f"plant {index}: a vehicle never enters the measurement area")
        lo = min(s[0] for s in spans)
        hi = max(s[1] for s in spans)
        if plant.start_time is None:
            start = cursor - (lo - steps)
        else:
            start = int(round(plant.start_time * fr))
        first, last = start + lo - steps, start + hi - steps
        if first < 0:
            raise ValueError(f"plant {index} would start before frame 0")
        for other, o_first, o_last in windows[plant.direction]:
            if first <= o_last and o_first <= last:
                raise ValueError(f"plants {other} and {index} overlap in time")
        windows[plant.direction].append((index, first, last))
        cursor = max(cursor, last + 1 + int(round(PLANT_SPACING * fr)))

        ids = []
        for (role, length, width, cls, motion, noise), (s0, s1) in zip(group, spans):
            sl = slice(s0, s1 + 1)
            sub = _Motion(*(getattr(motion, f)[sl] for f in ("x", "y", "vx", "vy", "ax", "ay")))
            vid = next_id
            next_id += 1
            ids.append(vid)
            vehicles.append(_Vehicle(vid, VehicleMeta(vid, cls, length, width, plant.direction),
                                     local[sl] + start, sub, noise))

        ego_id, ch_id = ids[0], ids[1]
        ego_v, ch_v = vehicles[-len(group)], vehicles[-len(group) + 1]
        entry = {"plant": index, "kind": plant.kind, "ego_id": ego_id, "challenger_id": ch_id,
                 "start_frame": start}
        if plant.kind == "swerve":
            overlap = np.intersect1d(ego_v.frames, ch_v.frames)
            entry["start_frame"] = int(overlap[0])
            entry["end_frame"] = int(overlap[-1])
            entry["expected"] = {
                "relation": "Lead" if plant.relative_lane == 0 else "Side",
                "relative_lane": plant.relative_lane,
                "lateral_range": plant.lateral_range,
                "max_lateral_acceleration": plant.max_lateral_acceleration,
                "v_ego0": plant.v_ego0,
                "v_ch0": plant.v_ch0,
            }
        else:
            T = plant.maneuver_duration
            entry["end_frame"] = start + int(math.ceil(T * fr - 1e-9))
            expected = {"v_ego0": plant.v_ego0, "v_ch0": plant.v_ch0,
                        "initial_distance": plant.initial_distance, "v_ch_final": plant.v_ch_final}
            if plant.kind == "brake":
                expected.update(brake_duration=plant.brake_duration,
                                peak_deceleration=1.5 * (plant.v_ch0 - plant.v_ch_final) / T)
            else:
                expected.update(relative_lane=plant.relative_lane,
                                initial_lane_offset=plant.initial_lane_offset,
                                cutin_distance=plant.cutin_distance,
                                final_lane_offset=plant.final_lane_offset,
                                thw0=plant.initial_distance / plant.v_ego0)
            entry["expected"] = expected
        ledger.append(entry)

    if background:
        speed = float(rng.uniform(20.0, 30.0))
        marks = meta.markings(background_direction)
        n_lanes = len(marks) - 1
        centers = 0.5 * (marks[:-1] + marks[1:])
        headway = int(round(2.0 * fr))
        for j in range(background):
            lane = 1 + j % n_lanes
            motion = _constant(tau, 2.25, centers[lane - 1], speed)
            s0, s1 = _span(_visible(motion, 4.5, area))
            sl = slice(s0, s1 + 1)
            sub = _Motion(*(getattr(motion, f)[sl] for f in ("x", "y", "vx", "vy", "ax", "ay")))
            entry = cursor + (j // n_lanes) * headway
            vid = next_id
            next_id += 1
            vehicles.append(_Vehicle(vid, VehicleMeta(vid, "Car", 4.5, 1.8, background_direction),
                                     local[sl] - local[s0] + entry, sub))

    for veh in vehicles:
        marks = meta.markings(veh.meta.driving_direction)
        veh.lanes = np.clip(np.searchsorted(marks, veh.motion.y, side="right"), 1, len(marks) - 1)
    neighbors, dhw, thw = _neighbors(vehicles)
    for k, veh in enumerate(vehicles):
        veh.neighbors, veh.dhw, veh.thw = neighbors[k], dhw[k], thw[k]
        if veh.noise > 0:
            veh.motion.x = veh.motion.x + rng.normal(0.0, veh.noise, len(veh.frames))
            veh.motion.y = veh.motion.y + rng.normal(0.0, veh.noise, len(veh.frames))

    tracks = {veh.vid: _to_raw(veh, meta) for veh in vehicles}
    recording = Recording(meta=meta, vehicles={v.vid: v.meta for v in vehicles}, tracks=tracks)
    return recording, ledger


# -- highD CSV writer ----------------------------------------------------------

RECORDING_META_COLUMNS = [
    "id", "frameRate", "locationId", "speedLimit", "month", "weekDay", "startTime",
    "duration", "totalDrivenDistance", "totalDrivenTime", "numVehicles", "numCars",
    "numTrucks", "upperLaneMarkings", "lowerLaneMarkings", "measurementAreaLength",
]
TRACKS_META_COLUMNS = [
    "id", "width", "height", "initialFrame", "finalFrame", "numFrames", "class",
    "drivingDirection", "traveledDistance", "minXVelocity", "maxXVelocity", "meanXVelocity",
    "minDHW", "minTHW", "minTTC", "numLaneChanges",
]
TRACKS_COLUMNS = [
    "frame", "id", "x", "y", "width", "height", "xVelocity", "yVelocity", "xAcceleration",
    "yAcceleration", "frontSightDistance", "backSightDistance", "dhw", "thw", "ttc",
    "precedingXVelocity", "precedingId", "followingId", "leftPrecedingId", "leftAlongsideId",
    "leftFollowingId", "rightPrecedingId", "rightAlongsideId", "rightFollowingId", "laneId",
]


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_rows(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_highd_csv(recording: Recording, directory) -> Tuple[Path, Path, Path]:
    """Write a raw recording as the three highD CSV files.

    Floats are written with full ``repr`` precision, so reading the files back
    reproduces the recording exactly.
    """
    if recording.canonical:
        raise ValueError("write_highd_csv expects raw (non-canonical) recordings")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = recording.meta
    prefix = f"{meta.recording_id:02d}"
    paths = (directory / f"{prefix}_recordingMeta.csv",
             directory / f"{prefix}_tracksMeta.csv",
             directory / f"{prefix}_tracks.csv")
    fr = meta.frame_rate

    n_frames = sum(len(t) for t in recording.tracks.values())
    last = max((t.last_frame for t in recording.tracks.values()), default=-1)
    classes = [v.vehicle_class for v in recording.vehicles.values()]
    driven = sum(float(abs(t.x[-1] - t.x[0])) for t in recording.tracks.values())
    _write_rows(paths[0], RECORDING_META_COLUMNS, [[
        str(meta.recording_id), _fmt(fr), "0",
        _fmt(meta.speed_limit) if meta.speed_limit else "-1.0",
        "01", "Monday", "00:00", _fmt((last + 1) / fr), _fmt(driven), _fmt(n_frames / fr),
        str(len(recording.vehicles)), str(classes.count("Car")), str(classes.count("Truck")),
        ";".join(_fmt(m) for m in meta.upper_lane_markings),
        ";".join(_fmt(m) for m in meta.lower_lane_markings),
        _fmt(meta.measurement_area_length),
    ]])

    rows = []
    for vid in sorted(recording.vehicles):
        v = recording.vehicles[vid]
        t = recording.tracks.get(vid)
        if t is None:
            continue
        speed = np.abs(t.vx)
        dhw = t.dhw[t.dhw > 0]
        thw = t.thw[t.thw > 0]
        rows.append([
            str(vid), _fmt(v.length), _fmt(v.width), str(t.first_frame), str(t.last_frame),
            str(len(t)), v.vehicle_class, str(v.driving_direction), _fmt(abs(t.x[-1] - t.x[0])),
            _fmt(speed.min()), _fmt(speed.max()), _fmt(speed.mean()),
            _fmt(dhw.min() if len(dhw) else -1.0), _fmt(thw.min() if len(thw) else -1.0), "-1.0",
            str(int(np.count_nonzero(np.diff(t.lane_id)))),
        ])
    _write_rows(paths[1], TRACKS_META_COLUMNS, rows)

    area = meta.measurement_area_length
    speeds = {vid: dict(zip(t.frames.tolist(), t.vx.tolist())) for vid, t in recording.tracks.items()}
    rows = []
    for vid in sorted(recording.tracks):
        t = recording.tracks[vid]
        v = recording.vehicles[vid]
        forward = v.driving_direction == 2
        for i in range(len(t)):
            frame = int(t.frames[i])
            front = area - (t.x[i] + v.length) if forward else t.x[i]
            back = t.x[i] if forward else area - (t.x[i] + v.length)
            pre = int(t.neighbors["preceding"][i])
            pre_v = speeds.get(pre, {}).get(frame, 0.0) if pre else 0.0
            closing = abs(t.vx[i]) - abs(pre_v)
            ttc = t.dhw[i] / closing if pre and closing > 0 else -1.0
            rows.append([
                str(frame), str(vid), _fmt(t.x[i]), _fmt(t.y[i]), _fmt(v.length), _fmt(v.width),
                _fmt(t.vx[i]), _fmt(t.vy[i]), _fmt(t.ax[i]), _fmt(t.ay[i]),
                _fmt(front), _fmt(back), _fmt(t.dhw[i]), _fmt(t.thw[i]), _fmt(ttc), _fmt(pre_v),
                *(str(int(t.neighbors[k][i])) for k in NEIGHBOR_COLUMNS),
                str(int(t.lane_id[i])),
            ])
    rows.sort(key=lambda r: (int(r[0]), int(r[1])))
    _write_rows(paths[2], TRACKS_COLUMNS, rows)
    return paths


def write_ledger(ledger: Sequence[dict], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for entry in ledger:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    return path


def plants_from_json(data) -> Tuple[List[PlantSpec], Optional[RecordingMeta], int]:
    """Parse a plant description document.

    ``{"meta": {...default_meta kwargs...}, "background": 0, "plants": [{...}, ...]}``
    or a bare list of plant objects.
    """
    if isinstance(data, list):
        data = {"plants": data}
    meta = default_meta(**data["meta"]) if "meta" in data else None
    plants = [PlantSpec(**p) for p in data.get("plants", [])]
    return plants, meta, int(data.get("background", 0))
