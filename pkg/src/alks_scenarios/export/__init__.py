"""OpenSCENARIO / OpenDRIVE export with per-tool profiles."""

from .opendrive import opendrive_lane_id, render_opendrive, render_road
from .openscenario import (
    ScenarioDocument,
    parameter_table,
    read_parameters,
    render_openscenario,
)
from .profiles import CARLA, ESMINI, GENERIC, PROFILES, ToolProfile, get_profile
from .validate import Difference, Finding, structural_diff, validate_document
from .writer import export_all, export_scenario, scenario_dirname
from .xmlutil import format_number

__all__ = [
    "CARLA", "ESMINI", "GENERIC", "PROFILES", "Difference", "Finding", "ScenarioDocument",
    "ToolProfile", "export_all", "export_scenario", "format_number", "get_profile",
    "opendrive_lane_id", "parameter_table", "read_parameters", "render_opendrive",
    "render_openscenario", "render_road", "scenario_dirname", "structural_diff",
    "validate_document",
]
