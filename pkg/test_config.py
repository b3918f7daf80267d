#!/usr/bin/env python3
"""配置与场景文件"""

from fractions import Fraction

import orjson
import pytest

from config import (
    ENV_PREFIX, DecorationSpec, ScenarioConfig, check_bound, get_settings, load_scenario, load_settings,
    override_settings,
)
from errors import BoundExceededError, ScenarioError


def test_defaults(tmp_path):
    settings = load_settings(str(tmp_path / "missing.env"))
    assert settings.composition_bound == 8
    assert settings.cell_bound == 6
    assert settings.seed == 0


def test_environment_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_PREFIX + "COMPOSITION_BOUND", "5")
    monkeypatch.setenv(ENV_PREFIX + "SEED", "42")
    settings = load_settings(str(tmp_path / "missing.env"))
    assert settings.composition_bound == 5
    assert settings.seed == 42


def test_dotenv_file(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_PREFIX + "CELL_BOUND", raising=False)
    env_file = tmp_path / ".env"
    env_file.write_text(f"{ENV_PREFIX}CELL_BOUND=4\n")
    try:
        assert load_settings(str(env_file)).cell_bound == 4
    finally:
        monkeypatch.delenv(ENV_PREFIX + "CELL_BOUND", raising=False)


def test_invalid_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_PREFIX + "CELL_BOUND", "99")
    with pytest.raises(ScenarioError):
        load_settings(str(tmp_path / "missing.env"))


def test_override_settings_restores():
    before = get_settings().composition_bound
    with override_settings(composition_bound=2) as s:
        assert s.composition_bound == 2
        assert get_settings().composition_bound == 2
    assert get_settings().composition_bound == before


def test_override_settings_validates():
    before = get_settings()
    for bad in ({"composition_bound": -1}, {"cell_bound": 99}, {"witness_retries": 0}):
        with pytest.raises(ScenarioError):
            with override_settings(**bad):
                pass
    assert get_settings() is before


def test_check_bound():
    check_bound(3, 3, "n")
    with pytest.raises(BoundExceededError):
        check_bound(4, 3, "n")


def test_decoration_spec_times():
    assert DecorationSpec(symbol="A", time="1/2").time_value() == Fraction(1, 2)
    assert DecorationSpec(symbol="A", time=-3).time_value() == Fraction(-3)
    with pytest.raises(ValueError):
        DecorationSpec(symbol="A", time="soon")


def _write(tmp_path, payload):
    path = tmp_path / "scenario.json"
    path.write_bytes(orjson.dumps(payload))
    return str(path)


def test_load_scenario(tmp_path):
    path = _write(tmp_path, {
        "n": 2,
        "n_g": 1,
        "decorations": [{"symbol": "A", "time": 2}, {"symbol": "B", "time": "-1", "label": "b"}],
        "observable": "A",
    })
    scenario = load_scenario(path)
    assert isinstance(scenario, ScenarioConfig)
    assert scenario.interaction.symbol == "S"
    assert scenario.decorations[1].label == "b"
    assert scenario.n_j == 2


@pytest.mark.parametrize("payload", [
    {"decorations": [{"symbol": "A"}, {"symbol": "A"}]},
    {"decorations": [{"symbol": "S"}]},
    {"decorations": [{"symbol": "A"}], "observable": "Z"},
    {"decorations": [{"symbol": "A"}], "observable": "S"},
    {"n_g": 99},
    {"n": -1},
])
def test_invalid_scenarios(tmp_path, payload):
    with pytest.raises(ScenarioError):
        load_scenario(_write(tmp_path, payload))


def test_unreadable_scenario(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(str(tmp_path / "nothing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioError):
        load_scenario(str(bad))
