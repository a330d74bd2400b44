"""Minimal straight-road OpenDRIVE 1.4 documents."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional, Sequence

import numpy as np

from ..exceptions import ExportError
from ..ingest import RecordingMeta
from .xmlutil import format_number, serialize

MIN_ROAD_LENGTH = 1200.0
ROAD_ID = "1"
HEADER_DATE = "2021-01-01T00:00:00"


def opendrive_lane_id(lane: int, n_lanes: int) -> int:
    """OpenDRIVE id of lane ``lane`` (1 = rightmost) on a road with ``n_lanes`` right lanes.

    Right-side ids run from -1 next to the reference line outwards, so the
    rightmost lane gets ``-n_lanes``.
    """
    if not 1 <= lane <= n_lanes:
        raise ExportError(f"lane {lane} does not exist on a {n_lanes}-lane road")
    return -(n_lanes - lane + 1)


def _road_mark(parent, kind: str):
    ET.SubElement(parent, "roadMark", sOffset="0", type=kind, weight="standard",
                  color="standard", width="0.15", laneChange="both" if kind == "broken" else "none")


def render_road(lane_widths: Sequence[float], speed_limit: Optional[float] = None,
                length: float = MIN_ROAD_LENGTH, date: str = HEADER_DATE) -> str:
    """Straight road with one driving direction; ``lane_widths`` ordered rightmost first.

    ``speed_limit`` is in m/s.
    """
    widths = [float(w) for w in lane_widths]
    if not widths:
        raise ExportError("road needs at least one lane")
    if any(not w > 0 for w in widths):
        raise ExportError(f"lane widths must be positive, got {widths}")
    length = max(float(length), MIN_ROAD_LENGTH)
    n = len(widths)

    root = ET.Element("OpenDRIVE")
    ET.SubElement(root, "header", revMajor="1", revMinor="4", name="straight_highway",
                  version="1.00", date=date, north="0", south="0", east="0", west="0")
    road = ET.SubElement(root, "road", name="highway", length=format_number(length), id=ROAD_ID,
                         junction="-1", rule="RHT")
    ET.SubElement(road, "link")
    kind = ET.SubElement(road, "type", s="0", type="motorway")
    if speed_limit is not None and speed_limit > 0:
        ET.SubElement(kind, "speed", max=format_number(speed_limit), unit="m/s")
    plan = ET.SubElement(road, "planView")
    geometry = ET.SubElement(plan, "geometry", s="0", x="0", y="0", hdg="0",
                             length=format_number(length))
    ET.SubElement(geometry, "line")
    ET.SubElement(road, "elevationProfile")
    ET.SubElement(road, "lateralProfile")
    lanes = ET.SubElement(road, "lanes")
    ET.SubElement(lanes, "laneOffset", s="0", a="0", b="0", c="0", d="0")
    section = ET.SubElement(lanes, "laneSection", s="0")
    center = ET.SubElement(section, "center")
    _road_mark(ET.SubElement(center, "lane", id="0", type="none", level="false"), "solid")
    right = ET.SubElement(section, "right")
    for i in range(1, n + 1):
        lane = ET.SubElement(right, "lane", id=str(-i), type="driving", level="false")
        ET.SubElement(lane, "link")
        ET.SubElement(lane, "width", sOffset="0", a=format_number(widths[n - i]), b="0", c="0", d="0")
        _road_mark(lane, "solid" if i == n else "broken")
    return serialize(root)


def render_opendrive(meta: RecordingMeta, direction: int, length: float = MIN_ROAD_LENGTH) -> str:
    """Road matching the lanes of one driving direction of a recording."""
    if direction not in (1, 2):
        raise ExportError(f"driving direction must be 1 or 2, got {direction}")
    marks = meta.markings(direction)
    if len(marks) < 2:
        raise ExportError(f"need at least 2 lane markings, got {len(marks)}")
    return render_road(np.diff(marks), meta.speed_limit, length)
