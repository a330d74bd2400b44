"""scikit-learn style wrappers so the pipeline stages compose in a ``Pipeline``.

The stages work on lists of recordings and scenarios rather than feature
matrices, so they only follow the estimator conventions (constructor
parameters, ``fit``/``transform``/``predict``, ``get_params``).
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import List, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .detection import DetectionConfig
from .extraction import SCENARIO_TYPES, OddConfig, ScenarioRecord, filter_odd
from .ingest import Recording, canonicalize, find_recordings, load_recording
from .maneuvers import DEFAULT_TRIGGER_TIME
from .pipeline import extract_scenarios
from .replay import DEFAULT_TIMESTEP, SimTrace, replay
from .stats import ComparisonReport, compare

_SCENARIO_CLASSES = tuple(SCENARIO_TYPES.values())


def check_recordings(X) -> List[Recording]:
    """Normalize ``X`` to a list of recordings.

    Accepts a Recording, a highD data directory, a ``(meta, tracks_meta,
    tracks)`` path triple, or a sequence of any of these.
    """
    if isinstance(X, Recording):
        return [X]
    if isinstance(X, (str, Path)):
        path = Path(X)
        if not path.is_dir():
            raise ValueError(f"{path} is not a directory of highD recordings")
        return [load_recording(*t) for t in find_recordings(path)]
    if isinstance(X, tuple) and len(X) == 3 and all(isinstance(p, (str, Path)) for p in X):
        return [load_recording(*X)]
    if isinstance(X, Sequence):
        out = []
        for item in X:
            out.extend(check_recordings(item))
        return out
    raise TypeError(f"expected recordings, got {type(X).__name__}")


def check_scenarios(X) -> List[ScenarioRecord]:
    if isinstance(X, _SCENARIO_CLASSES):
        return [X]
    if isinstance(X, (str, bytes)) or not isinstance(X, Sequence):
        raise TypeError(f"expected a sequence of scenarios, got {type(X).__name__}")
    for i, item in enumerate(X):
        if not isinstance(item, _SCENARIO_CLASSES):
            raise TypeError(f"item {i} is a {type(item).__name__}, not a scenario")
    return list(X)


class ScenarioExtractor(TransformerMixin, BaseEstimator):
    """Recordings in, scenario records out."""

    def __init__(self, brake_threshold=2.0, brake_edge_threshold=0.2,
                 lateral_velocity_threshold=0.2, swerve_range=1.2):
        self.brake_threshold = brake_threshold
        self.brake_edge_threshold = brake_edge_threshold
        self.lateral_velocity_threshold = lateral_velocity_threshold
        self.swerve_range = swerve_range

    def fit(self, X=None, y=None):
        self.config_ = DetectionConfig(
            brake_peak_threshold=self.brake_threshold,
            brake_edge_threshold=self.brake_edge_threshold,
            lc_lateral_velocity_threshold=self.lateral_velocity_threshold,
            swerve_range_threshold=self.swerve_range,
        )
        return self

    def transform(self, X) -> List[ScenarioRecord]:
        check_is_fitted(self, "config_")
        self.skip_reasons_ = Counter()
        out = []
        for rec in check_recordings(X):
            out.extend(extract_scenarios(canonicalize(rec), self.config_, self.skip_reasons_))
        return out


class OddFilter(TransformerMixin, BaseEstimator):
    """Keeps the scenarios inside the operational design domain."""

    def __init__(self, max_ego_speed=70.0, min_peak_deceleration=2.0, min_swerve_range=1.2,
                 max_cutin_thw=None):
        self.max_ego_speed = max_ego_speed
        self.min_peak_deceleration = min_peak_deceleration
        self.min_swerve_range = min_swerve_range
        self.max_cutin_thw = max_cutin_thw

    def fit(self, X=None, y=None):
        self.config_ = OddConfig(self.max_ego_speed, self.min_peak_deceleration,
                                 self.min_swerve_range, self.max_cutin_thw)
        return self

    def transform(self, X) -> List[ScenarioRecord]:
        check_is_fitted(self, "config_")
        return filter_odd(check_scenarios(X), self.config_)


class ScenarioReplayer(BaseEstimator):
    """Replays scenarios; ``predict`` returns one trace per scenario."""

    def __init__(self, timestep=DEFAULT_TIMESTEP, t_trigger=DEFAULT_TRIGGER_TIME):
        self.timestep = timestep
        self.t_trigger = t_trigger

    def fit(self, X=None, y=None):
        if not 0 < self.timestep <= 0.1:
            raise ValueError(f"timestep must lie in (0, 0.1], got {self.timestep}")
        if not self.t_trigger > 0:
            raise ValueError("t_trigger must be positive")
        self.fitted_ = True
        return self

    def predict(self, X) -> List[SimTrace]:
        check_is_fitted(self, "fitted_")
        return [replay(s, self.timestep, self.t_trigger) for s in check_scenarios(X)]

    def compare(self, X, recordings) -> List[ComparisonReport]:
        """Replay-vs-recording errors; each scenario is matched by recording id."""
        check_is_fitted(self, "fitted_")
        by_id = {r.meta.recording_id: canonicalize(r) for r in check_recordings(recordings)}
        reports = []
        for s in check_scenarios(X):
            if s.recording_id not in by_id:
                raise ValueError(f"no recording with id {s.recording_id}")
            trace = replay(s, self.timestep, self.t_trigger)
            reports.append(compare(s, by_id[s.recording_id], self.timestep, trace))
        return reports
