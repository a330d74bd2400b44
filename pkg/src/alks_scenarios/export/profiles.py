"""Per-simulator export conventions."""

from __future__ import annotations

from dataclasses import dataclass

from ..exceptions import ExportError

_FIXED = {
    # name: (relative_lane_sign, lane_change_shape, role, environment, target_lane_reference)
    "EsminiLike": (1, "Sinusoidal", False, False, "RelativeToEgo"),
    "CarlaLike": (-1, "Linear", True, True, "RelativeToSelf"),
}


@dataclass(frozen=True)
class ToolProfile:
    name: str
    relative_lane_sign: int = 1
    lane_change_shape: str = "Sinusoidal"
    emit_role_attribute: bool = False
    emit_environment_action: bool = False
    target_lane_reference: str = "RelativeToEgo"

    def __post_init__(self):
        if self.name not in ("Generic", "EsminiLike", "CarlaLike"):
            raise ExportError(f"unknown tool profile {self.name!r}")
        if self.relative_lane_sign not in (1, -1):
            raise ExportError("relative_lane_sign must be +1 or -1")
        if self.lane_change_shape not in ("Sinusoidal", "Linear"):
            raise ExportError(f"unknown lane change shape {self.lane_change_shape!r}")
        if self.target_lane_reference not in ("RelativeToEgo", "RelativeToSelf"):
            raise ExportError(f"unknown target lane reference {self.target_lane_reference!r}")
        fixed = _FIXED.get(self.name)
        if fixed is not None and fixed != (self.relative_lane_sign, self.lane_change_shape,
                                           self.emit_role_attribute, self.emit_environment_action,
                                           self.target_lane_reference):
            raise ExportError(f"{self.name} settings are fixed: {fixed}")


GENERIC = ToolProfile("Generic")
ESMINI = ToolProfile("EsminiLike", *_FIXED["EsminiLike"])
CARLA = ToolProfile("CarlaLike", *_FIXED["CarlaLike"])

PROFILES = {"generic": GENERIC, "esmini": ESMINI, "carla": CARLA}


def get_profile(name: str) -> ToolProfile:
    """Look a profile up by its CLI name (``generic``, ``esmini``, ``carla``) or full name."""
    if isinstance(name, ToolProfile):
        return name
    key = str(name).lower()
    for profile in PROFILES.values():
        if profile.name.lower() == key:
            return profile
    try:
        return PROFILES[key]
    except KeyError:
        raise ExportError(f"unknown tool profile {name!r}; choose from {', '.join(PROFILES)}") from None
