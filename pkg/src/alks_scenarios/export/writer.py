"""Writing exported scenarios to disk, one directory per scenario."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Sequence

from ..database import atomic_write_text
from ..extraction import ScenarioRecord
from .openscenario import ROAD_FILE, render_openscenario
from .profiles import ToolProfile, get_profile

SCENARIO_FILE = "scenario.xosc"
SIDECAR_FILE = "scenario.json"


def scenario_dirname(scenario: ScenarioRecord) -> str:
    return (f"{scenario.kind}_rec{scenario.recording_id:02d}_ego{scenario.ego_id}"
            f"_ch{scenario.challenger_id}_f{scenario.start_frame}")


def export_scenario(scenario: ScenarioRecord, profile, out_dir, **render_kw) -> Path:
    """Render one scenario and write its .xosc, .xodr and JSON sidecar."""
    profile = get_profile(profile)
    doc = render_openscenario(scenario, profile, road_file=ROAD_FILE, **render_kw)
    target = Path(out_dir) / scenario_dirname(scenario)
    atomic_write_text(target / SCENARIO_FILE, doc.scenario_xml)
    atomic_write_text(target / ROAD_FILE, doc.road_xml)
    sidecar = {
        "kind": scenario.kind,
        "profile": profile.name,
        "recording_id": scenario.recording_id,
        "ego_id": scenario.ego_id,
        "challenger_id": scenario.challenger_id,
        "start_frame": scenario.start_frame,
        "end_frame": scenario.end_frame,
        "parameters": doc.parameter_table,
    }
    atomic_write_text(target / SIDECAR_FILE, json.dumps(sidecar, indent=2) + "\n")
    return target


def export_all(scenarios: Sequence[ScenarioRecord], profile: ToolProfile, out_dir,
               jobs: int = 1) -> List[Path]:
    """Export a batch; the returned paths follow the input order for any ``jobs``."""
    profile = get_profile(profile)
    if jobs <= 1:
        return [export_scenario(s, profile, out_dir) for s in scenarios]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda s: export_scenario(s, profile, out_dir), scenarios))
