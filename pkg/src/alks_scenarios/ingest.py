"""Loading highD-format recordings and converting them to a canonical frame.

highD stores both driving directions in one image coordinate system: x grows
to the right of the image, y grows downwards and positions refer to the
upper-left corner of each bounding box.  Everything downstream works in a
per-direction canonical frame instead:

* x is the box center and increases in the direction of travel,
* y is the box center and is positive towards the driver's left,
* lanes are numbered per direction, 1 being the rightmost lane.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from .exceptions import IngestError

logger = logging.getLogger(__name__)

DEFAULT_AREA_LENGTH = 420.0

NEIGHBOR_COLUMNS = {
    "preceding": "precedingId",
    "following": "followingId",
    "left_preceding": "leftPrecedingId",
    "left_alongside": "leftAlongsideId",
    "left_following": "leftFollowingId",
    "right_preceding": "rightPrecedingId",
    "right_alongside": "rightAlongsideId",
    "right_following": "rightFollowingId",
}

RECORDING_META_REQUIRED = ["id", "frameRate", "upperLaneMarkings", "lowerLaneMarkings"]
TRACKS_META_REQUIRED = ["id", "width", "height", "class", "drivingDirection"]
TRACKS_REQUIRED = [
    "frame", "id", "x", "y", "width", "height",
    "xVelocity", "yVelocity", "xAcceleration", "yAcceleration",
    "dhw", "thw", *NEIGHBOR_COLUMNS.values(), "laneId",
]

VEHICLE_CLASSES = ("Car", "Truck")


@dataclass(frozen=True)
class RecordingMeta:
    recording_id: int
    frame_rate: float
    upper_lane_markings: tuple
    lower_lane_markings: tuple
    measurement_area_length: float = DEFAULT_AREA_LENGTH
    speed_limit: Optional[float] = None  # m/s, None when unrestricted

    def __post_init__(self):
        if not self.frame_rate > 0:
            raise ValueError(f"frame_rate must be positive, got {self.frame_rate}")
        if not self.measurement_area_length > 0:
            raise ValueError("measurement_area_length must be positive")
        for name in ("upper_lane_markings", "lower_lane_markings"):
            marks = tuple(float(m) for m in getattr(self, name))
            if any(b <= a for a, b in zip(marks, marks[1:])):
                raise ValueError(f"{name} must be strictly increasing: {marks}")
            object.__setattr__(self, name, marks)

    def markings(self, direction: int) -> np.ndarray:
        """Lane markings of one driving direction in the canonical lateral axis.

        Sorted from the rightmost marking to the leftmost one, so lane ``k``
        lies between entries ``k - 1`` and ``k``.
        """
        if direction == 1:
            return np.asarray(self.upper_lane_markings, dtype=float)
        if direction == 2:
            return np.sort(-np.asarray(self.lower_lane_markings, dtype=float))
        raise ValueError(f"driving direction must be 1 or 2, got {direction}")

    def lane_widths(self, direction: int) -> np.ndarray:
        return np.diff(self.markings(direction))

    def lane_count(self, direction: int) -> int:
        return max(len(self.markings(direction)) - 1, 0)


@dataclass(frozen=True)
class VehicleMeta:
    vehicle_id: int
    vehicle_class: str
    length: float
    width: float
    driving_direction: int

    def __post_init__(self):
        if not (self.length > 0 and self.width > 0):
            raise ValueError(f"vehicle {self.vehicle_id}: dimensions must be positive")
        if self.driving_direction not in (1, 2):
            raise ValueError(f"vehicle {self.vehicle_id}: bad driving direction {self.driving_direction}")


@dataclass(frozen=True)
class KinematicState:
    frame: int
    x: float
    y: float
    vx: float
    vy: float
    ax: float
    ay: float
    lane_id: int
    lane_offset: float
    preceding_id: Optional[int]
    following_id: Optional[int]
    thw: Optional[float]
    dhw: Optional[float]


@dataclass(eq=False)
class Track:
    """Per-frame channels of one vehicle, stored column-wise.

    Neighbor ids use 0 for "no neighbor", like the source files.  ``lane_offset``
    is NaN until the recording is canonicalized.
    """

    vehicle_id: int
    frames: np.ndarray
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    lane_id: np.ndarray
    dhw: np.ndarray
    thw: np.ndarray
    neighbors: Dict[str, np.ndarray]
    lane_offset: np.ndarray = None

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.int64)
        n = len(self.frames)
        if n < 2:
            raise ValueError(f"track {self.vehicle_id} has {n} states, need at least 2")
        if np.any(np.diff(self.frames) != 1):
            raise ValueError(f"track {self.vehicle_id}: frame gap")
        for name in ("x", "y", "vx", "vy", "ax", "ay", "dhw", "thw"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        self.lane_id = np.asarray(self.lane_id, dtype=np.int64)
        if self.lane_offset is None:
            self.lane_offset = np.full(n, np.nan)
        self.neighbors = {
            key: np.asarray(self.neighbors.get(key, np.zeros(n)), dtype=np.int64)
            for key in NEIGHBOR_COLUMNS
        }

    def __len__(self):
        return len(self.frames)

    @property
    def first_frame(self) -> int:
        return int(self.frames[0])

    @property
    def last_frame(self) -> int:
        return int(self.frames[-1])

    def index(self, frame: int) -> int:
        if not self.first_frame <= frame <= self.last_frame:
            raise IndexError(
                f"frame {frame} outside track {self.vehicle_id} "
                f"[{self.first_frame}, {self.last_frame}]"
            )
        return int(frame - self.first_frame)

    def covers(self, start: int, end: int) -> bool:
        return self.first_frame <= start and end <= self.last_frame


@dataclass(eq=False)
class Recording:
    meta: RecordingMeta
    vehicles: Dict[int, VehicleMeta]
    tracks: Dict[int, Track]
    canonical: bool = False
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        unknown = sorted(set(self.tracks) - set(self.vehicles))
        if unknown:
            raise ValueError(f"tracks reference unknown vehicle ids {unknown}")


def state_at(track: Track, frame: int) -> KinematicState:
    """Stored state of ``track`` at ``frame``; no interpolation."""
    i = track.index(frame)

    def _id(key):
        value = int(track.neighbors[key][i])
        return value if value > 0 else None

    def _positive(value):
        value = float(value)
        return value if value > 0 else None

    return KinematicState(
        frame=int(track.frames[i]),
        x=float(track.x[i]),
        y=float(track.y[i]),
        vx=float(track.vx[i]),
        vy=float(track.vy[i]),
        ax=float(track.ax[i]),
        ay=float(track.ay[i]),
        lane_id=int(track.lane_id[i]),
        lane_offset=float(track.lane_offset[i]),
        preceding_id=_id("preceding"),
        following_id=_id("following"),
        thw=_positive(track.thw[i]),
        dhw=_positive(track.dhw[i]),
    )


# -- CSV loading ---------------------------------------------------------------


def _read_csv(path: Path, required) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise IngestError("missing file", path=path)
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise IngestError("malformed header: file is empty", path=path, row=1) from None
    df.columns = [c.strip() for c in df.columns]
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise IngestError(f"malformed header: missing columns {missing}", path=path, row=1,
                          column=missing[0])
    return df


def _numeric(df: pd.DataFrame, column: str, path: Path, integer=False) -> np.ndarray:
    raw = df[column].str.strip()
    values = pd.to_numeric(raw, errors="coerce")
    bad = values.isna().to_numpy()
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise IngestError(f"non-numeric cell {raw.iloc[i]!r}", path=path, row=i + 2, column=column)
    values = values.to_numpy(dtype=float)
    if integer:
        if np.any(values != np.round(values)):
            i = int(np.flatnonzero(values != np.round(values))[0])
            raise IngestError(f"expected an integer, got {raw.iloc[i]!r}", path=path,
                              row=i + 2, column=column)
        return values.astype(np.int64)
    return values


def _markings(text: str, path: Path, column: str):
    parts = [p.strip() for p in str(text).split(";") if p.strip()]
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise IngestError(f"non-numeric lane marking list {text!r}", path=path, row=2,
                          column=column) from None


def _load_meta(path: Path) -> RecordingMeta:
    df = _read_csv(path, RECORDING_META_REQUIRED)
    if len(df) != 1:
        raise IngestError(f"expected exactly one data row, found {len(df)}", path=path)
    rec_id = int(_numeric(df, "id", path, integer=True)[0])
    frame_rate = float(_numeric(df, "frameRate", path)[0])
    speed_limit = None
    if "speedLimit" in df.columns and df["speedLimit"].iloc[0].strip():
        value = float(_numeric(df, "speedLimit", path)[0])
        speed_limit = value if value > 0 else None
    area = None
    if "measurementAreaLength" in df.columns:
        area = float(_numeric(df, "measurementAreaLength", path)[0])
    try:
        return RecordingMeta(
            recording_id=rec_id,
            frame_rate=frame_rate,
            upper_lane_markings=_markings(df["upperLaneMarkings"].iloc[0], path, "upperLaneMarkings"),
            lower_lane_markings=_markings(df["lowerLaneMarkings"].iloc[0], path, "lowerLaneMarkings"),
            measurement_area_length=area if area is not None else DEFAULT_AREA_LENGTH,
            speed_limit=speed_limit,
        ), area is not None
    except ValueError as exc:
        raise IngestError(str(exc), path=path, row=2) from None


def _load_vehicles(path: Path, warnings: list) -> Dict[int, VehicleMeta]:
    df = _read_csv(path, TRACKS_META_REQUIRED)
    ids = _numeric(df, "id", path, integer=True)
    lengths = _numeric(df, "width", path)
    widths = _numeric(df, "height", path)
    directions = _numeric(df, "drivingDirection", path, integer=True)
    vehicles = {}
    for i, vid in enumerate(ids):
        cls = df["class"].iloc[i].strip()
        if cls not in VEHICLE_CLASSES:
            msg = f"vehicle {vid}: unknown class {cls!r}, treated as Car"
            logger.warning(msg)
            warnings.append(msg)
            cls = "Car"
        if directions[i] not in (1, 2):
            raise IngestError(f"driving direction must be 1 or 2, got {directions[i]}",
                              path=path, row=i + 2, column="drivingDirection")
        if not (lengths[i] > 0 and widths[i] > 0):
            raise IngestError("vehicle dimensions must be positive", path=path, row=i + 2,
                              column="width")
        vehicles[int(vid)] = VehicleMeta(int(vid), cls, float(lengths[i]), float(widths[i]),
                                         int(directions[i]))
    return vehicles


def load_recording(meta_path, tracks_meta_path, tracks_path) -> Recording:
    """Read the three highD CSV files of one recording.

    Coordinates are kept exactly as stored; see :func:`canonicalize`.
    """
    warnings: List[str] = []
    meta, has_area = _load_meta(Path(meta_path))
    vehicles = _load_vehicles(Path(tracks_meta_path), warnings)

    path = Path(tracks_path)
    df = _read_csv(path, TRACKS_REQUIRED)
    cols = {c: _numeric(df, c, path) for c in TRACKS_REQUIRED}
    for c in ["frame", "id", "laneId", *NEIGHBOR_COLUMNS.values()]:
        cols[c] = _numeric(df, c, path, integer=True)

    ids = cols["id"]
    unknown = ~np.isin(ids, np.fromiter(vehicles, dtype=np.int64, count=len(vehicles)))
    if unknown.any():
        i = int(np.flatnonzero(unknown)[0])
        raise IngestError(f"track references unknown vehicle id {ids[i]}", path=path,
                          row=i + 2, column="id")

    tracks = {}
    order = np.lexsort((cols["frame"], ids))
    sorted_ids = ids[order]
    bounds = np.flatnonzero(np.diff(sorted_ids)) + 1
    for rows in np.split(order, bounds) if len(order) else []:
        vid = int(ids[rows[0]])
        frames = cols["frame"][rows]
        steps = np.diff(frames)
        if np.any(steps != 1):
            j = int(np.flatnonzero(steps != 1)[0])
            kind = "duplicate frame" if steps[j] == 0 else "frame gap"
            raise IngestError(f"{kind} for vehicle {vid} after frame {frames[j]}", path=path,
                              row=int(rows[j + 1]) + 2, column="frame")
        if len(rows) < 2:
            raise IngestError(f"vehicle {vid} has a single state", path=path,
                              row=int(rows[0]) + 2, column="frame")
        tracks[vid] = Track(
            vehicle_id=vid,
            frames=frames,
            x=cols["x"][rows],
            y=cols["y"][rows],
            vx=cols["xVelocity"][rows],
            vy=cols["yVelocity"][rows],
            ax=cols["xAcceleration"][rows],
            ay=cols["yAcceleration"][rows],
            lane_id=cols["laneId"][rows],
            dhw=cols["dhw"][rows],
            thw=cols["thw"][rows],
            neighbors={k: cols[c][rows] for k, c in NEIGHBOR_COLUMNS.items()},
        )

    if not has_area and len(df):
        # without an explicit column, the image extent bounds the measurement area
        extent = float(np.max(cols["x"] + cols["width"]))
        meta = replace(meta, measurement_area_length=max(extent, 1.0))
    return Recording(meta=meta, vehicles=vehicles, tracks=tracks, warnings=warnings)


def find_recordings(directory) -> List[tuple]:
    """All ``(meta, tracks_meta, tracks)`` path triples in a highD data directory."""
    directory = Path(directory)
    triples = []
    for meta in sorted(directory.glob("*_recordingMeta.csv")):
        prefix = meta.name[: -len("_recordingMeta.csv")]
        triples.append((meta, directory / f"{prefix}_tracksMeta.csv",
                        directory / f"{prefix}_tracks.csv"))
    return triples


# -- canonical frame -----------------------------------------------------------


def _canonical_lanes(raw_lane, y_canon, meta: RecordingMeta, direction: int) -> np.ndarray:
    n_upper = len(meta.upper_lane_markings)
    n_lanes = meta.lane_count(direction)
    if direction == 1:
        lanes = raw_lane - 1
    else:
        lanes = n_upper + 1 + len(meta.lower_lane_markings) - raw_lane
    bad = (lanes < 1) | (lanes > n_lanes)
    if bad.any():
        # ids outside this direction's lanes: fall back to the lateral position
        marks = meta.markings(direction)
        positional = np.clip(np.searchsorted(marks, y_canon, side="right"), 1, max(n_lanes, 1))
        lanes = np.where(bad, positional, lanes)
    return lanes.astype(np.int64)


def lane_centers(meta: RecordingMeta, direction: int) -> np.ndarray:
    """Canonical lateral position of each lane center, index 0 = lane 1."""
    marks = meta.markings(direction)
    return 0.5 * (marks[:-1] + marks[1:])


def canonicalize(recording: Recording) -> Recording:
    """Convert a raw recording to the canonical per-direction frame.

    Tracks whose driving direction contradicts their net displacement are
    dropped and reported in ``warnings``.  Already canonical recordings are
    returned unchanged.
    """
    if recording.canonical:
        return recording
    meta = recording.meta
    warnings = list(recording.warnings)
    tracks = {}
    for vid, track in recording.tracks.items():
        vehicle = recording.vehicles[vid]
        direction = vehicle.driving_direction
        xc = track.x + vehicle.length / 2.0
        yc = track.y + vehicle.width / 2.0
        if direction == 1:
            x, y = meta.measurement_area_length - xc, yc
            vx, vy, ax, ay = -track.vx, track.vy, -track.ax, track.ay
        else:
            x, y = xc, -yc
            vx, vy, ax, ay = track.vx, -track.vy, track.ax, -track.ay
        if x[-1] < x[0]:
            msg = (f"vehicle {vid}: driving direction {direction} contradicts its "
                   f"displacement, track excluded")
            logger.warning(msg)
            warnings.append(msg)
            continue
        lanes = _canonical_lanes(track.lane_id, y, meta, direction)
        centers = lane_centers(meta, direction)
        offset = y - centers[lanes - 1] if len(centers) else np.full(len(y), np.nan)
        tracks[vid] = Track(
            vehicle_id=vid,
            frames=track.frames.copy(),
            x=x, y=y, vx=vx, vy=vy, ax=ax, ay=ay,
            lane_id=lanes,
            dhw=track.dhw.copy(),
            thw=track.thw.copy(),
            neighbors={k: v.copy() for k, v in track.neighbors.items()},
            lane_offset=offset,
        )
    return Recording(meta=meta, vehicles=dict(recording.vehicles), tracks=tracks,
                     canonical=True, warnings=warnings)
