"""OpenSCENARIO 1.0 rendering from per-type templates.

Templates are XML text with ``@{Name}`` placeholders.  Binding fills them with
parameter values, entity dimensions and header fields; the resulting tree is
then adapted to the tool profile and serialized.  Storyboard elements refer to
parameters through the usual ``$Name`` syntax, so a document can be
re-parameterized without touching its storyboard.
"""

from __future__ import annotations

import string
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict
from xml.sax.saxutils import escape

from ..exceptions import ExportError
from ..extraction import BrakeScenario, CutInScenario, ScenarioRecord, SwerveScenario
from ..maneuvers import DEFAULT_TRIGGER_TIME, feasible_trigger_time, initial_gap_for_trigger
from ..replay import POST_MANEUVER, maneuver_duration
from .opendrive import HEADER_DATE, MIN_ROAD_LENGTH, opendrive_lane_id, render_road
from .profiles import ESMINI, ToolProfile
from .xmlutil import format_number, serialize

EGO_START_S = 50.0
ROAD_FILE = "road.xodr"
VEHICLE_HEIGHT = {"Car": 1.5, "Truck": 3.8}
CATEGORY = {"Car": "car", "Truck": "truck"}

# Names of the parameters describing each scenario type, in declaration order.
SCENARIO_PARAMETERS = {
    "brake": ("EgoInitialVelocity", "ChallengerInitialVelocity", "InitialDistance",
              "BrakeTriggerDistance", "BrakeDuration", "ChallengerFinalVelocity"),
    "cutin": ("EgoInitialVelocity", "ChallengerInitialVelocity", "InitialDistance",
              "ChallengerRelativeLane", "ChallengerInitialLaneOffset", "CutInTriggerDistance",
              "CutInDistance", "ChallengerFinalVelocity", "ChallengerFinalLaneOffset"),
    "swerve": ("EgoInitialVelocity", "ChallengerInitialVelocity", "InitialDistance",
               "ChallengerRelativeLane", "SwerveTriggerDistance", "LateralRange",
               "MaxLateralAcceleration"),
}
# Placement and timing parameters that the tools need on top of those.
TOOL_PARAMETERS = {
    "brake": ("TriggerTime", "TriggerRule", "StopTime", "EgoLaneId", "EgoStartS",
              "ChallengerStartDs"),
    "cutin": ("TriggerTime", "TriggerRule", "StopTime", "EgoLaneId", "EgoStartS",
              "ChallengerStartDs", "LaneChangeDuration", "TargetLaneValue"),
    "swerve": ("TriggerTime", "TriggerRule", "StopTime", "EgoLaneId", "EgoStartS",
               "ChallengerStartDs", "SwerveAmplitude", "SwerveAmplitudeNegative"),
}
_PARAMETER_TYPE = {"TriggerRule": "string", "ChallengerRelativeLane": "integer",
                   "EgoLaneId": "integer", "TargetLaneValue": "integer"}


class _Template(string.Template):
    delimiter = "@"


@dataclass(frozen=True)
class ScenarioDocument:
    scenario_xml: str
    road_xml: str
    parameter_table: Dict[str, object] = field(default_factory=dict)


def load_template(kind: str) -> str:
    try:
        return resources.files(__package__).joinpath("templates", f"{kind}.xosc.tmpl").read_text(
            encoding="utf-8")
    except FileNotFoundError:
        raise ExportError(f"no template for scenario type {kind!r}") from None


def parameter_text(value) -> str:
    return value if isinstance(value, str) else format_number(value)


def parameter_table(scenario: ScenarioRecord, profile: ToolProfile = ESMINI,
                    t_trigger: float = DEFAULT_TRIGGER_TIME) -> Dict[str, object]:
    """Every declared parameter of the exported document with its value.

    The starting gap is back-calculated so the recorded gap is reached at
    ``t_trigger``; a shorter trigger time is used when that is impossible.
    """
    kind = scenario.kind
    if kind not in SCENARIO_PARAMETERS:
        raise ExportError(f"unsupported scenario type {type(scenario).__name__}")
    D = scenario.trigger_distance
    v_e, v_c = scenario.v_ego0, scenario.v_ch0
    t_trig = feasible_trigger_time(D, v_e, v_c, t_trigger)
    gap = initial_gap_for_trigger(D, v_e, v_c, t_trig)
    duration = maneuver_duration(scenario)
    sign = profile.relative_lane_sign

    table = {"EgoInitialVelocity": v_e, "ChallengerInitialVelocity": v_c, "InitialDistance": gap}
    if isinstance(scenario, BrakeScenario):
        table.update(BrakeTriggerDistance=D, BrakeDuration=scenario.brake_duration,
                     ChallengerFinalVelocity=scenario.v_ch_final)
    elif isinstance(scenario, CutInScenario):
        table.update(ChallengerRelativeLane=sign * scenario.relative_lane,
                     ChallengerInitialLaneOffset=scenario.initial_lane_offset,
                     CutInTriggerDistance=D, CutInDistance=scenario.cutin_distance,
                     ChallengerFinalVelocity=scenario.v_ch_final,
                     ChallengerFinalLaneOffset=scenario.final_lane_offset)
    elif isinstance(scenario, SwerveScenario):
        table.update(ChallengerRelativeLane=sign * scenario.relative_lane,
                     SwerveTriggerDistance=D, LateralRange=scenario.lateral_range,
                     MaxLateralAcceleration=scenario.max_lateral_acceleration)

    table.update(
        TriggerTime=t_trig,
        TriggerRule="greaterThan" if v_c > v_e else "lessThan",
        StopTime=t_trig + duration + POST_MANEUVER,
        EgoLaneId=opendrive_lane_id(scenario.lane_id, len(scenario.lane_widths)),
        EgoStartS=EGO_START_S,
        ChallengerStartDs=gap + 0.5 * (scenario.ego_length + scenario.ch_length),
    )
    if isinstance(scenario, CutInScenario):
        table["LaneChangeDuration"] = duration
        if profile.target_lane_reference == "RelativeToEgo":
            table["TargetLaneValue"] = 0
        else:
            table["TargetLaneValue"] = sign * -scenario.relative_lane
    elif isinstance(scenario, SwerveScenario):
        table["SwerveAmplitude"] = 0.5 * scenario.lateral_range
        table["SwerveAmplitudeNegative"] = -0.5 * scenario.lateral_range
    order = SCENARIO_PARAMETERS[kind] + TOOL_PARAMETERS[kind]
    return {name: table[name] for name in order}


def _parameter_block(table: Dict[str, object]) -> str:
    lines = []
    for name, value in table.items():
        ptype = _PARAMETER_TYPE.get(name, "double")
        lines.append(f'    <ParameterDeclaration name="{name}" parameterType="{ptype}" '
                     f'value="{escape(parameter_text(value))}"/>')
    return "\n".join(lines)


def _vehicle_fields(prefix: str, length: float, width: float, cls: str) -> Dict[str, str]:
    height = VEHICLE_HEIGHT.get(cls, 1.5)
    return {
        f"{prefix}Length": format_number(length),
        f"{prefix}Width": format_number(width),
        f"{prefix}Height": format_number(height),
        f"{prefix}CenterZ": format_number(0.5 * height),
        f"{prefix}Track": format_number(width),
        f"{prefix}AxleX": format_number(0.3 * length),
        f"{prefix}Class": escape(cls),
        f"{prefix}Category": CATEGORY.get(cls, "car"),
    }


def describe(scenario: ScenarioRecord) -> str:
    title = {"brake": "Lead Vehicle Brake", "cutin": "Cut-In", "swerve": "Swerving Vehicle"}
    return (f"{title[scenario.kind]}: recording {scenario.recording_id}, ego {scenario.ego_id}, "
            f"challenger {scenario.challenger_id}, frame {scenario.start_frame}")


def bind_template(text: str, values: Dict[str, str]) -> str:
    try:
        return _Template(text).substitute(values)
    except KeyError as exc:
        raise ExportError(f"unbound template placeholder {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ExportError(f"malformed template placeholder: {exc}") from None


def _environment_action() -> ET.Element:
    action = ET.Element("GlobalAction")
    env_action = ET.SubElement(action, "EnvironmentAction")
    env = ET.SubElement(env_action, "Environment", name="Environment")
    ET.SubElement(env, "ParameterDeclarations")
    ET.SubElement(env, "TimeOfDay", animation="false", dateTime="2021-06-01T12:00:00")
    weather = ET.SubElement(env, "Weather", cloudState="free")
    ET.SubElement(weather, "Sun", intensity="1.0", azimuth="0", elevation="1.31")
    ET.SubElement(weather, "Fog", visualRange="100000.0")
    ET.SubElement(weather, "Precipitation", precipitationType="dry", intensity="0.0")
    ET.SubElement(env, "RoadCondition", frictionScaleFactor="1.0")
    return action


def apply_profile(root: ET.Element, profile: ToolProfile) -> ET.Element:
    """Structural adaptations of a bound document to ``profile``, in place."""
    if profile.lane_change_shape == "Linear":
        for dyn in root.iter("LaneChangeActionDynamics"):
            dyn.set("dynamicsShape", "linear")
    if profile.target_lane_reference == "RelativeToSelf":
        for target in root.iter("RelativeTargetLane"):
            target.set("entityRef", "Challenger")
    if profile.emit_role_attribute:
        roles = {"Ego": "ego_vehicle", "Challenger": "simulation"}
        for obj in root.iter("ScenarioObject"):
            props = obj.find("Vehicle/Properties")
            ET.SubElement(props, "Property", name="type", value=roles[obj.get("name")])
    if profile.emit_environment_action:
        actions = root.find("Storyboard/Init/Actions")
        actions.insert(0, _environment_action())
    return root


def render_openscenario(scenario: ScenarioRecord, profile: ToolProfile = ESMINI,
                        t_trigger: float = DEFAULT_TRIGGER_TIME, date: str = HEADER_DATE,
                        road_file: str = ROAD_FILE) -> ScenarioDocument:
    table = parameter_table(scenario, profile, t_trigger)
    has_lane = "ChallengerRelativeLane" in table
    values = {
        "Date": escape(date),
        "Description": escape(describe(scenario)),
        "RoadFile": escape(road_file),
        "ParameterBlock": _parameter_block(table),
        "InitDLane": "$ChallengerRelativeLane" if has_lane else "0",
        "InitOffset": "$ChallengerInitialLaneOffset" if "ChallengerInitialLaneOffset" in table else "0",
        **_vehicle_fields("Ego", scenario.ego_length, scenario.ego_width, scenario.ego_class),
        **_vehicle_fields("Ch", scenario.ch_length, scenario.ch_width, scenario.ch_class),
    }
    text = bind_template(load_template(scenario.kind), values)
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ExportError(f"template for {scenario.kind} is not well-formed XML: {exc}") from None
    apply_profile(root, profile)

    v_max = max(scenario.v_ego0, scenario.v_ch0)
    length = max(MIN_ROAD_LENGTH,
                 EGO_START_S + table["ChallengerStartDs"] + v_max * table["StopTime"] + 100.0)
    road = render_road(scenario.lane_widths, scenario.speed_limit, length, date=date)
    return ScenarioDocument(serialize(root), road, table)


def read_parameters(scenario_xml: str) -> Dict[str, str]:
    """Declared parameter values of a document, as written."""
    root = ET.fromstring(scenario_xml)
    block = root.find("ParameterDeclarations")
    if block is None:
        return {}
    return {p.get("name"): p.get("value") for p in block.findall("ParameterDeclaration")}

