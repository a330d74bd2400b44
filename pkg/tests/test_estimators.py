import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from alks_scenarios.estimators import (
    OddFilter,
    ScenarioExtractor,
    ScenarioReplayer,
    check_recordings,
    check_scenarios,
)
from alks_scenarios.synthetic import PlantSpec, synthesize_recording, write_highd_csv

PLANTS = [
    PlantSpec("brake", v_ego0=12.0, v_ch0=20.0, initial_distance=35.0, v_ch_final=13.0,
              brake_duration=3.0),
    PlantSpec("brake", v_ego0=20.0, v_ch0=26.0, initial_distance=35.0, v_ch_final=21.0,
              brake_duration=2.5),
    PlantSpec("cutin", v_ego0=14.0, v_ch0=16.0, initial_distance=25.0, v_ch_final=15.0,
              cutin_distance=70.0),
]


@pytest.fixture(scope="module")
def recording():
    return synthesize_recording(PLANTS)[0]


def test_pipeline_composition(recording):
    pipe = make_pipeline(ScenarioExtractor(), OddFilter(max_ego_speed=70.0))
    kept = pipe.fit_transform(recording)
    # the 20 m/s (72 km/h) brake lies outside the speed bound
    assert sorted(s.kind for s in kept) == ["brake", "cutin"]
    assert pipe.get_params()["oddfilter__max_ego_speed"] == 70.0
    pipe.set_params(oddfilter__max_ego_speed=100.0)
    assert len(pipe.fit_transform(recording)) == 3


def test_params_and_clone():
    ex = ScenarioExtractor(brake_threshold=3.0)
    twin = clone(ex)
    assert twin.get_params() == ex.get_params()
    assert not hasattr(twin, "config_")
    with pytest.raises(NotFittedError):
        twin.transform([])
    with pytest.raises(ValueError):
        ScenarioExtractor(brake_threshold=0.0).fit()


def test_extractor_threshold(recording):
    ex = ScenarioExtractor(brake_threshold=2.5).fit()
    kinds = sorted(s.kind for s in ex.transform(recording))
    # peaks: 1.5 * 7 / 3 = 3.5 and 1.5 * 5 / 2.5 = 3.0
    assert kinds == ["brake", "brake", "cutin"]
    ex = ScenarioExtractor(brake_threshold=3.2).fit()
    assert sorted(s.kind for s in ex.transform(recording)) == ["brake", "cutin"]


def test_replayer(recording, tmp_path):
    scenarios = ScenarioExtractor().fit_transform(recording)
    rep = ScenarioReplayer(timestep=0.02).fit()
    traces = rep.predict(scenarios)
    assert len(traces) == 3 and all(t.timestep == 0.02 for t in traces)
    reports = rep.compare(scenarios, recording)
    assert all(r.rmse_velocity < 0.1 for r in reports)
    with pytest.raises(ValueError):
        ScenarioReplayer(timestep=0.5).fit()
    with pytest.raises(NotFittedError):
        ScenarioReplayer().predict(scenarios)


def test_input_checks(recording, tmp_path):
    paths = write_highd_csv(recording, tmp_path)
    assert len(check_recordings(tmp_path)) == 1
    assert len(check_recordings([paths, recording])) == 2
    with pytest.raises(TypeError):
        check_recordings(42)
    with pytest.raises(ValueError):
        check_recordings(tmp_path / "nope")
    with pytest.raises(TypeError):
        check_scenarios([recording])
    with pytest.raises(TypeError):
        check_scenarios("brake")
