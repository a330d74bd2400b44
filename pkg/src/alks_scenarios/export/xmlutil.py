"""Small helpers shared by the XML writers."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET

INDENT = "  "


def format_number(value) -> str:
    """Canonical text form of a parameter value: integers as-is, floats with 6 significant digits."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numeric parameters")
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot export non-finite value {value}")
    text = f"{value:.6g}"
    return "0" if text == "-0" else text


def serialize(root: ET.Element) -> str:
    """UTF-8 document text with a declaration, 2-space indentation and LF endings."""
    ET.indent(root, space=INDENT)
    # Attribute values are escaped, so " />" only occurs as an empty-element end.
    body = ET.tostring(root, encoding="unicode").replace(" />", "/>")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"
