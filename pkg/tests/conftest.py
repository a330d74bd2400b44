import csv
from pathlib import Path

import pytest

from alks_scenarios.synthetic import RECORDING_META_COLUMNS, TRACKS_COLUMNS, TRACKS_META_COLUMNS

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record one acceptance criterion outcome for the end-of-run summary."""

    def record(number: int, title: str, passed: bool, detail: str = ""):
        _ACCEPTANCE[number] = (title, passed, detail)
        print(f"[acceptance {number}] {'PASS' if passed else 'FAIL'} {title} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        status = "PASS" if passed else ("SKIP" if passed is None else "FAIL")
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  {detail}")


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_fixture(directory, vehicles, upper="8.0;11.5;15.0", lower="18.0;21.5;25.0",
                  frame_rate=25, recording_id=1, extra_meta=None):
    """Hand-built highD files.

    ``vehicles`` maps id -> dict(cls, length, width, direction, rows) where rows
    are (frame, x, y, vx, vy, ax, ay, lane, preceding, following).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    prefix = f"{recording_id:02d}"
    meta_row = {c: "0" for c in RECORDING_META_COLUMNS}
    meta_row.update(id=str(recording_id), frameRate=str(frame_rate), speedLimit="-1.00",
                    upperLaneMarkings=upper, lowerLaneMarkings=lower,
                    measurementAreaLength="420.0")
    meta_row.update(extra_meta or {})
    header = list(meta_row)
    _write(directory / f"{prefix}_recordingMeta.csv", header, [[meta_row[c] for c in header]])

    tm_rows, t_rows = [], []
    for vid, v in vehicles.items():
        frames = [r[0] for r in v["rows"]]
        row = {c: "0" for c in TRACKS_META_COLUMNS}
        row.update(id=vid, width=v["length"], height=v["width"], initialFrame=min(frames),
                   finalFrame=max(frames), numFrames=len(frames), **{"class": v["cls"]},
                   drivingDirection=v["direction"])
        tm_rows.append([row[c] for c in TRACKS_META_COLUMNS])
        for frame, x, y, vx, vy, ax, ay, lane, pre, fol in v["rows"]:
            r = {c: 0 for c in TRACKS_COLUMNS}
            r.update(frame=frame, id=vid, x=x, y=y, width=v["length"], height=v["width"],
                     xVelocity=vx, yVelocity=vy, xAcceleration=ax, yAcceleration=ay,
                     laneId=lane, precedingId=pre, followingId=fol)
            t_rows.append([r[c] for c in TRACKS_COLUMNS])
    _write(directory / f"{prefix}_tracksMeta.csv", TRACKS_META_COLUMNS, tm_rows)
    _write(directory / f"{prefix}_tracks.csv", TRACKS_COLUMNS, t_rows)
    return (directory / f"{prefix}_recordingMeta.csv", directory / f"{prefix}_tracksMeta.csv",
            directory / f"{prefix}_tracks.csv")


def straight_rows(first, n, x0, vx, y, lane, pre=0, fol=0):
    return [(first + i, x0 + vx * i / 25.0, y, vx, 0.0, 0.0, 0.0, lane, pre, fol)
            for i in range(n)]


@pytest.fixture
def two_vehicle_files(tmp_path):
    """Two direction-2 cars, 100 frames each, in lanes 5 and 6."""
    vehicles = {
        1: dict(cls="Car", length=4.5, width=1.8, direction=2,
                rows=straight_rows(0, 100, 10.0, 20.0, 19.75 - 0.9, 5)),
        2: dict(cls="Truck", length=12.0, width=2.5, direction=2,
                rows=straight_rows(0, 100, 60.0, 18.0, 23.25 - 1.25, 6)),
    }
    return write_fixture(tmp_path, vehicles)


def canonical_recording(channels, frame_rate=25.0, lanes=3, lane_width=3.5):
    """Canonical direction-2 recording built straight from per-vehicle channels.

    ``channels`` maps id -> dict(x, y, vx[, vy, ax, ay, first_frame]); y is
    measured from the right road edge, lane ids follow from it.
    """
    import numpy as np

    from alks_scenarios.ingest import Recording, RecordingMeta, Track, VehicleMeta

    lower = tuple(10.0 + lane_width * np.arange(lanes + 1))
    meta = RecordingMeta(1, frame_rate, (0.0, lane_width), lower)
    edge = meta.markings(2)[0]
    marks = meta.markings(2) - edge
    vehicles, tracks = {}, {}
    for vid, ch in channels.items():
        x = np.asarray(ch["x"], dtype=float)
        n = len(x)
        zeros = np.zeros(n)
        y = np.asarray(ch["y"], dtype=float)
        lane = np.clip(np.searchsorted(marks, y, side="right"), 1, lanes)
        centers = 0.5 * (marks[:-1] + marks[1:])
        vehicles[vid] = VehicleMeta(vid, "Car", 4.5, 1.8, 2)
        tracks[vid] = Track(
            vehicle_id=vid, frames=np.arange(n) + ch.get("first_frame", 0), x=x, y=y + edge,
            vx=np.asarray(ch["vx"], dtype=float) * np.ones(n),
            vy=np.asarray(ch.get("vy", zeros), dtype=float),
            ax=np.asarray(ch.get("ax", zeros), dtype=float),
            ay=np.asarray(ch.get("ay", zeros), dtype=float),
            lane_id=lane, dhw=zeros, thw=zeros, neighbors={},
            lane_offset=y - centers[lane - 1],
        )
    return Recording(meta, vehicles, tracks, canonical=True)
