"""Replay-vs-recording error metrics and exposure statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .extraction import (
    KMH,
    SCENARIO_TYPES,
    BrakeScenario,
    CutInScenario,
    OddConfig,
    ScenarioRecord,
    filter_odd,
)
from .ingest import Recording
from .replay import DEFAULT_TIMESTEP, SimTrace, replay

_ALIGN_EPS = 1e-9


@dataclass(frozen=True)
class TrackSlice:
    """Recorded challenger channels on a time axis starting at maneuver start.

    ``y`` is measured from the right road edge, like the replay's lateral axis.
    """

    t: np.ndarray
    v: np.ndarray
    y: np.ndarray
    duration: float


def track_slice(recording: Recording, vehicle_id: int, start_frame: int,
                end_frame: int) -> TrackSlice:
    track = recording.tracks[vehicle_id]
    direction = recording.vehicles[vehicle_id].driving_direction
    fr = recording.meta.frame_rate
    frames = track.frames
    t = (frames - start_frame) / fr
    edge = recording.meta.markings(direction)[0]
    return TrackSlice(t=t, v=track.vx.copy(), y=track.y - edge,
                      duration=(end_frame - start_frame) / fr)


def _aligned(sim: SimTrace, recorded: TrackSlice, sim_channel: str, rec_channel: str):
    tau = sim.t - sim.trigger_time
    window = min(sim.maneuver_duration, recorded.duration)
    lo = max(0.0, float(recorded.t[0]))
    hi = min(window, float(recorded.t[-1]))
    mask = (tau >= lo - _ALIGN_EPS) & (tau <= hi + _ALIGN_EPS)
    if mask.sum() < 2:
        raise ValueError("simulation and recording do not overlap on the maneuver interval")
    tau = tau[mask]
    simulated = getattr(sim, sim_channel)[mask]
    measured = np.interp(tau, recorded.t, getattr(recorded, rec_channel))
    return simulated, measured, (float(tau[0]), float(tau[-1]))


def _rmse(a, b) -> float:
    return float(np.sqrt(np.mean((np.asarray(a) - np.asarray(b)) ** 2)))


def rmse_velocity(sim: SimTrace, recorded: TrackSlice) -> float:
    """Challenger speed RMSE over the maneuver interval, in km/h.

    The trigger time of the simulation is aligned with the recorded maneuver
    start; the recording is linearly interpolated onto the simulation grid.
    """
    simulated, measured, _ = _aligned(sim, recorded, "ch_v", "v")
    return _rmse(simulated, measured) * KMH


def rmse_lateral(sim: SimTrace, recorded: TrackSlice) -> float:
    """Challenger lateral position RMSE over the maneuver interval, in m."""
    simulated, measured, _ = _aligned(sim, recorded, "ch_y", "y")
    return _rmse(simulated, measured)


@dataclass(frozen=True)
class ComparisonReport:
    scenario_ref: str
    rmse_velocity: float  # km/h
    rmse_lateral: float  # m
    n_samples: int
    aligned_interval: tuple

    def to_dict(self) -> dict:
        return {"record": "comparison", "scenario_ref": self.scenario_ref,
                "rmse_velocity_kmh": self.rmse_velocity, "rmse_lateral_m": self.rmse_lateral,
                "n_samples": self.n_samples, "aligned_interval": list(self.aligned_interval)}


def scenario_ref(scenario: ScenarioRecord) -> str:
    return (f"{scenario.kind}:rec{scenario.recording_id}:ego{scenario.ego_id}"
            f":ch{scenario.challenger_id}:f{scenario.start_frame}")


def compare(scenario: ScenarioRecord, recording: Recording, timestep: float = DEFAULT_TIMESTEP,
            trace: Optional[SimTrace] = None) -> ComparisonReport:
    """Replay ``scenario`` and compare the challenger with its recorded track."""
    if scenario.recording_id != recording.meta.recording_id:
        raise ValueError(f"scenario from recording {scenario.recording_id} compared with "
                         f"recording {recording.meta.recording_id}")
    if not recording.canonical:
        raise ValueError("recording must be canonicalized first")
    if trace is None:
        trace = replay(scenario, timestep)
    recorded = track_slice(recording, scenario.challenger_id, scenario.start_frame,
                           scenario.end_frame)
    v_sim, v_rec, interval = _aligned(trace, recorded, "ch_v", "v")
    y_sim, y_rec, _ = _aligned(trace, recorded, "ch_y", "y")
    return ComparisonReport(
        scenario_ref=scenario_ref(scenario),
        rmse_velocity=_rmse(v_sim, v_rec) * KMH,
        rmse_lateral=_rmse(y_sim, y_rec),
        n_samples=len(v_sim),
        aligned_interval=interval,
    )


def mean_rmse(reports: Sequence[ComparisonReport]) -> Dict[str, float]:
    """Unweighted mean of the per-scenario errors."""
    if not reports:
        return {"rmse_velocity": math.nan, "rmse_lateral": math.nan}
    return {"rmse_velocity": float(np.mean([r.rmse_velocity for r in reports])),
            "rmse_lateral": float(np.mean([r.rmse_lateral for r in reports]))}


# -- histograms ----------------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    bin_edges: tuple
    counts: tuple
    unit: str = ""

    def __post_init__(self):
        if self.counts and len(self.bin_edges) != len(self.counts) + 1:
            raise ValueError("need one more edge than counts")

    @property
    def total(self) -> int:
        return int(sum(self.counts))

    def to_dict(self) -> dict:
        return {"bin_edges": list(self.bin_edges), "counts": list(self.counts), "unit": self.unit}

    def to_gnuplot(self) -> str:
        lines = [f"# bin_start bin_end count  [{self.unit}]"]
        for lo, hi, c in zip(self.bin_edges, self.bin_edges[1:], self.counts):
            lines.append(f"{lo:.6g} {hi:.6g} {c}")
        return "\n".join(lines) + "\n"


def histogram(values: Sequence[float], bin_width: float, origin: float = 0.0,
              unit: str = "") -> Histogram:
    """Count values in half-open bins ``[origin + k w, origin + (k + 1) w)``.

    The bins start at ``origin`` (or lower if values lie below it) and end
    with the bin holding the largest value.  Non-finite values raise.
    """
    if not bin_width > 0:
        raise ValueError(f"bin_width must be positive, got {bin_width}")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return Histogram((), (), unit)
    if not np.all(np.isfinite(values)):
        raise ValueError("histogram input contains NaN or infinite values")
    k = np.floor((values - origin) / bin_width).astype(np.int64)
    k_lo = min(0, int(k.min()))
    counts = np.bincount(k - k_lo)
    edges = origin + bin_width * np.arange(k_lo, k_lo + len(counts) + 1)
    return Histogram(tuple(float(e) for e in edges), tuple(int(c) for c in counts), unit)


# -- database summary ----------------------------------------------------------

VELOCITY_THRESHOLDS = (60.0, 70.0, 80.0, 100.0, 130.0)


@dataclass
class StatsReport:
    counts: Dict[str, Dict[str, int]]
    threshold_counts: Dict[str, Dict[str, int]]
    histograms: Dict[str, Histogram] = field(default_factory=dict)
    extrema: Dict[str, float] = field(default_factory=dict)

    def to_records(self) -> List[dict]:
        rows = [{"record": "count", "kind": k, **v} for k, v in self.counts.items()]
        rows += [{"record": "threshold_count", "max_ego_velocity_kmh": k, **v}
                 for k, v in self.threshold_counts.items()]
        rows += [{"record": "histogram", "name": k, **h.to_dict()}
                 for k, h in self.histograms.items()]
        rows += [{"record": "extremum", "name": k, "value": v} for k, v in self.extrema.items()]
        return rows


def _by_kind(scenarios):
    out = {kind: 0 for kind in SCENARIO_TYPES}
    for s in scenarios:
        out[s.kind] += 1
    return out


def summarize(db: Sequence[ScenarioRecord], odd: OddConfig = OddConfig(),
              distance_bin: float = 5.0, deceleration_bin: float = 0.25,
              thw_bin: float = 0.5) -> StatsReport:
    """Scenario counts before and after the ODD filter plus parameter histograms.

    Histograms and extrema describe the filtered scenarios.
    """
    kept = filter_odd(db, odd)
    total, filtered = _by_kind(db), _by_kind(kept)
    counts = {k: {"total": total[k], "filtered": filtered[k]} for k in SCENARIO_TYPES}

    threshold_counts = {}
    for v in VELOCITY_THRESHOLDS:
        subset = filter_odd(db, replace(odd, max_ego_velocity=v))
        threshold_counts[f"{v:g}"] = _by_kind(subset)

    brakes = [s for s in kept if isinstance(s, BrakeScenario)]
    cutins = [s for s in kept if isinstance(s, CutInScenario)]
    hists = {
        "brake_initial_distance": histogram([s.initial_distance for s in brakes], distance_bin, unit="m"),
        "brake_peak_deceleration": histogram([s.peak_deceleration for s in brakes],
                                             deceleration_bin, unit="m/s^2"),
        "cutin_initial_distance": histogram([s.initial_distance for s in cutins], distance_bin, unit="m"),
        "cutin_thw": histogram([s.thw0 for s in cutins], thw_bin, unit="s"),
    }
    extrema = {}
    if brakes:
        extrema["brake_max_peak_deceleration"] = max(s.peak_deceleration for s in brakes)
        extrema["brake_min_initial_distance"] = min(s.initial_distance for s in brakes)
    if cutins:
        extrema["cutin_min_initial_distance"] = min(s.initial_distance for s in cutins)
        extrema["cutin_min_thw"] = min(s.thw0 for s in cutins)
    return StatsReport(counts=counts, threshold_counts=threshold_counts, histograms=hists,
                       extrema=extrema)


def write_gnuplot_tables(report: StatsReport, directory) -> List[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, hist in report.histograms.items():
        path = directory / f"{name}.dat"
        path.write_text(hist.to_gnuplot(), encoding="utf-8")
        paths.append(path)
    return paths
