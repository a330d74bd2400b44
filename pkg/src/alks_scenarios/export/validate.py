"""Structural checks of exported documents and a tree diff for profile comparisons."""

from __future__ import annotations

import difflib
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import List, Optional

from .openscenario import ScenarioDocument

NUMERIC_ATTRIBUTES = frozenset({
    "x", "y", "z", "h", "p", "r", "s", "ds", "dLane", "offset", "laneId",
    "width", "length", "height", "maxSpeed", "maxAcceleration", "maxDeceleration",
    "maxSteering", "wheelDiameter", "trackWidth", "positionX", "positionZ",
    "revMajor", "revMinor", "delay", "targetLaneOffset", "maxLateralAcc",
    "maximumExecutionCount", "intensity", "azimuth", "elevation", "visualRange",
    "frictionScaleFactor",
})
# Elements whose ``value`` attribute is a number.
NUMERIC_VALUE_ELEMENTS = frozenset({
    "AbsoluteTargetSpeed", "SpeedActionDynamics", "LaneChangeActionDynamics",
    "RelativeTargetLane", "AbsoluteTargetLane", "AbsoluteTargetLaneOffset",
    "RelativeDistanceCondition", "SimulationTimeCondition",
})
REQUIRED_PATHS = ("FileHeader", "ParameterDeclarations", "Entities", "Storyboard")


@dataclass(frozen=True)
class Finding:
    kind: str  # well-formedness, missing-element, undeclared-parameter, non-numeric
    message: str
    parameter: Optional[str] = None

    def __str__(self):
        return f"{self.kind}: {self.message}"


def _is_number(text: str) -> bool:
    try:
        float(text)
    except (TypeError, ValueError):
        return False
    return True


def validate_scenario_xml(text: str) -> List[Finding]:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        return [Finding("well-formedness", f"scenario XML is not well-formed: {exc}")]

    findings = []
    if root.tag != "OpenSCENARIO":
        findings.append(Finding("missing-element", f"root element is {root.tag}, not OpenSCENARIO"))
    for path in REQUIRED_PATHS:
        if root.find(path) is None:
            findings.append(Finding("missing-element", f"missing {path}"))
    if root.find("Storyboard/Story/Act") is None:
        findings.append(Finding("missing-element", "Storyboard has no Act"))

    declared = {}
    block = root.find("ParameterDeclarations")
    if block is not None:
        for p in block.findall("ParameterDeclaration"):
            name, value = p.get("name"), p.get("value")
            declared[name] = value
            if p.get("parameterType") in ("double", "integer") and not _is_number(value):
                findings.append(Finding("non-numeric", f"parameter {name} has non-numeric value "
                                        f"{value!r}", name))

    for elem in root.iter():
        for attr, raw in elem.attrib.items():
            value = raw
            if raw.startswith("$"):
                name = raw[1:]
                if name not in declared:
                    findings.append(Finding("undeclared-parameter",
                                            f"{elem.tag}@{attr} references undeclared parameter "
                                            f"{name}", name))
                    continue
                value = declared[name]
            numeric = attr in NUMERIC_ATTRIBUTES or (
                attr == "value" and elem.tag in NUMERIC_VALUE_ELEMENTS)
            if numeric and not _is_number(value):
                findings.append(Finding("non-numeric", f"{elem.tag}@{attr}={value!r} is not a number"))
    return findings


def validate_document(doc: ScenarioDocument) -> List[Finding]:
    """Empty list when the scenario (and its road, if any) pass the structural checks."""
    findings = validate_scenario_xml(doc.scenario_xml)
    if doc.road_xml:
        try:
            road = ET.fromstring(doc.road_xml)
        except ET.ParseError as exc:
            findings.append(Finding("well-formedness", f"road XML is not well-formed: {exc}"))
        else:
            if road.tag != "OpenDRIVE" or road.find("road") is None:
                findings.append(Finding("missing-element", "road XML has no OpenDRIVE road"))
    return findings


# -- structural diff -----------------------------------------------------------


@dataclass(frozen=True)
class Difference:
    path: str
    kind: str  # attribute, added, removed, text
    attribute: Optional[str] = None
    a: Optional[str] = None
    b: Optional[str] = None


def _label(elem: ET.Element) -> str:
    name = elem.get("name")
    return f"{elem.tag}[{name}]" if name else elem.tag


def _diff(a: ET.Element, b: ET.Element, path: str, out: List[Difference]):
    for attr in list(a.attrib) + [k for k in b.attrib if k not in a.attrib]:
        va, vb = a.get(attr), b.get(attr)
        if va != vb:
            out.append(Difference(path, "attribute", attr, va, vb))
    ta, tb = (a.text or "").strip(), (b.text or "").strip()
    if ta != tb:
        out.append(Difference(path, "text", None, ta, tb))
    ka, kb = [_label(c) for c in a], [_label(c) for c in b]
    matcher = difflib.SequenceMatcher(a=ka, b=kb, autojunk=False)
    for op, i1, i2, j1, j2 in matcher.get_opcodes():
        if op == "equal":
            for ca, cb in zip(a[i1:i2], b[j1:j2]):
                _diff(ca, cb, f"{path}/{_label(ca)}", out)
            continue
        if op in ("replace", "delete"):
            out.extend(Difference(f"{path}/{_label(c)}", "removed") for c in a[i1:i2])
        if op in ("replace", "insert"):
            out.extend(Difference(f"{path}/{_label(c)}", "added") for c in b[j1:j2])


def structural_diff(a_xml: str, b_xml: str) -> List[Difference]:
    """Element-level differences between two XML documents, in document order.

    Children are aligned by tag and ``name`` attribute; unmatched children
    are reported as removed from ``a`` or added in ``b``.
    """
    a, b = ET.fromstring(a_xml), ET.fromstring(b_xml)
    out: List[Difference] = []
    if a.tag != b.tag:
        return [Difference("/", "removed"), Difference("/", "added")]
    _diff(a, b, f"/{_label(a)}", out)
    return out
