"""End-to-end extraction of one recording, shared by the estimators and the CLI."""

from __future__ import annotations

from collections import Counter
from typing import List, Optional, Tuple

from .detection import (
    DetectionConfig,
    detect_brake_maneuvers,
    detect_lane_changes,
    detect_swerving,
)
from .extraction import (
    ScenarioRecord,
    build_brake_scenarios,
    build_cutin_scenarios,
    build_swerve_scenarios,
)
from .ingest import Recording, canonicalize, load_recording


def extract_scenarios(recording: Recording, config: DetectionConfig = DetectionConfig(),
                      skips: Optional[Counter] = None) -> List[ScenarioRecord]:
    """All brake, cut-in and swerve scenarios of a recording, sorted by key."""
    rec = canonicalize(recording)
    anomalies: list = []
    scenarios = (
        build_brake_scenarios(rec, detect_brake_maneuvers(rec, config), skips)
        + build_cutin_scenarios(rec, detect_lane_changes(rec, config, anomalies), skips)
        + build_swerve_scenarios(rec, detect_swerving(rec, config), skips)
    )
    if skips is not None and anomalies:
        skips["lane change: lane id jumps by more than one lane"] += len(anomalies)
    return sorted(scenarios, key=lambda s: (s.key, s.kind, s.ego_id))


def extract_files(paths: Tuple, config: DetectionConfig = DetectionConfig()):
    """Load and extract one ``(meta, tracks_meta, tracks)`` triple.

    Returns ``(scenarios, skips, warnings)``; picklable so it can run in a worker process.
    """
    recording = canonicalize(load_recording(*paths))
    skips: Counter = Counter()
    return extract_scenarios(recording, config, skips), skips, list(recording.warnings)
