"""Extraction, export and replay of ALKS test scenarios from highD-format recordings."""

from .database import read_database, write_database
from .detection import (
    BrakeEvent,
    DetectionConfig,
    LaneChangeEvent,
    SwerveEvent,
    detect_brake_maneuvers,
    detect_lane_changes,
    detect_swerving,
)
from .estimators import OddFilter, ScenarioExtractor, ScenarioReplayer
from .exceptions import ExportError, IngestError, ReplayError, TriggerError
from .extraction import (
    BrakeScenario,
    CutInScenario,
    OddConfig,
    SwerveScenario,
    build_brake_scenarios,
    build_cutin_scenarios,
    build_swerve_scenarios,
    compute_thw,
    filter_odd,
)
from .ingest import Recording, RecordingMeta, Track, VehicleMeta, canonicalize, load_recording
from .maneuvers import (
    CubicBrakeProfile,
    SinusoidalLaneChange,
    initial_gap_for_trigger,
    peak_deceleration,
)
from .pipeline import extract_scenarios
from .replay import SimTrace, gap_at, replay
from .stats import compare, histogram, rmse_lateral, rmse_velocity, summarize

__version__ = "0.1.0"
