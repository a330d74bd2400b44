"""Closed-form maneuver primitives shared by export, replay and synthesis."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import TriggerError

DEFAULT_TRIGGER_TIME = 5.0

_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class CubicBrakeProfile:
    """Speed change from ``v0`` to ``vf`` over ``duration`` with flat ends.

    v(t) = v0 + (vf - v0) * (3 u^2 - 2 u^3),  u = t / duration
    """

    v0: float
    vf: float
    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")

    def _u(self, t):
        if t < -_EDGE_TOL or t > self.duration + _EDGE_TOL:
            raise ValueError(f"t={t} outside [0, {self.duration}]")
        return min(max(t / self.duration, 0.0), 1.0)

    def velocity(self, t: float) -> float:
        u = self._u(t)
        return self.v0 + (self.vf - self.v0) * u * u * (3.0 - 2.0 * u)

    def acceleration(self, t: float) -> float:
        u = self._u(t)
        return (self.vf - self.v0) * 6.0 * u * (1.0 - u) / self.duration

    def distance(self, t: float) -> float:
        """Distance covered since the start of the profile (exact integral)."""
        u = self._u(t)
        return self.duration * (self.v0 * u + (self.vf - self.v0) * (u ** 3 - 0.5 * u ** 4))


@dataclass(frozen=True)
class SinusoidalLaneChange:
    """Lateral position as a half cosine over the longitudinal travel ``length``."""

    d0: float
    df: float
    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"lane change length must be positive, got {self.length}")

    def _phase(self, s):
        if s < -_EDGE_TOL or s > self.length + _EDGE_TOL:
            raise ValueError(f"s={s} outside [0, {self.length}]")
        return math.pi * min(max(s / self.length, 0.0), 1.0)

    def lateral(self, s: float) -> float:
        phase = self._phase(s)
        if phase == math.pi:
            return self.df
        return self.d0 + 0.5 * (self.df - self.d0) * (1.0 - math.cos(phase))

    def slope(self, s: float) -> float:
        """d lateral / d s."""
        return 0.5 * (self.df - self.d0) * math.pi / self.length * math.sin(self._phase(s))

    def curvature(self, s: float) -> float:
        """d^2 lateral / d s^2."""
        k = math.pi / self.length
        return 0.5 * (self.df - self.d0) * k * k * math.cos(self._phase(s))


def cubic_velocity(profile: CubicBrakeProfile, t: float) -> float:
    return profile.velocity(t)


def peak_deceleration(profile: CubicBrakeProfile) -> float:
    """Largest deceleration of the profile, reached at half the duration."""
    return 1.5 * (profile.v0 - profile.vf) / profile.duration


def sinusoidal_lateral(profile: SinusoidalLaneChange, s: float) -> float:
    return profile.lateral(s)


def initial_gap_for_trigger(trigger_distance: float, v_ego: float, v_ch: float,
                            t_trigger: float = DEFAULT_TRIGGER_TIME) -> float:
    """Bumper gap at simulation start so the trigger gap is hit at ``t_trigger``.

    Both vehicles are assumed to keep their initial speeds until then.
    """
    if not trigger_distance > 0:
        raise ValueError(f"trigger distance must be positive, got {trigger_distance}")
    gap = trigger_distance + t_trigger * (v_ego - v_ch)
    if gap <= 0:
        raise TriggerError(
            f"initial gap {gap:.3f} m is not positive for t_trigger={t_trigger} s; "
            f"shorten the trigger time to below {max_trigger_time(trigger_distance, v_ego, v_ch):.3f} s"
        )
    return gap


def max_trigger_time(trigger_distance: float, v_ego: float, v_ch: float) -> float:
    """Supremum of trigger times that keep the starting gap positive."""
    opening = v_ch - v_ego
    return math.inf if opening <= 0 else trigger_distance / opening


def feasible_trigger_time(trigger_distance: float, v_ego: float, v_ch: float,
                          preferred: float = DEFAULT_TRIGGER_TIME) -> float:
    """``preferred`` if it works, otherwise a shortened trigger time.

    The shortened value is rounded down to 0.1 s and keeps at least half of the
    trigger distance as the starting gap.
    """
    limit = max_trigger_time(trigger_distance, v_ego, v_ch)
    if preferred < limit:
        return preferred
    return math.floor(0.5 * limit * 10.0) / 10.0


def lane_change_duration(length: float, v0: float, vf: float) -> float:
    """Duration of a lane change over ``length`` metres under a cubic speed change.

    The cubic covers ``duration * (v0 + vf) / 2`` metres, which fixes the duration.
    """
    if not v0 + vf > 0:
        raise ValueError("lane change needs a positive mean speed")
    return 2.0 * length / (v0 + vf)
