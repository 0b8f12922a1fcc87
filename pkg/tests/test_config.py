import json
from pathlib import Path

import pytest

from vineshape.config import (
    DEFAULT_CONFIG, ConfigError, RunConfig, config_from_dict, config_to_dict, load_config,
)

ROOT = Path(__file__).resolve().parents[1]


def test_shipped_file_matches_code_default():
    assert load_config(ROOT / "configs" / "default.json") == DEFAULT_CONFIG


def test_default_corruption_model():
    d = DEFAULT_CONFIG.drift
    assert (d.mean_rate, d.rate_spread, d.noise_std, d.mounting_std) == (1.33, 1.0, 0.5, 20.0)
    assert DEFAULT_CONFIG.sweeps.active.bend_radius_factor == 2.0


def test_round_trip_through_dict():
    assert config_from_dict(config_to_dict(DEFAULT_CONFIG)) == DEFAULT_CONFIG


def test_empty_document_is_default():
    assert config_from_dict({}) == RunConfig()


def test_partial_override():
    cfg = config_from_dict({"seed": 4, "drift": {"rate_spread": 0}, "sweeps": {"passive": {"angles": [10, 20]}}})
    assert cfg.seed == 4
    assert cfg.drift.rate_spread == 0.0 and cfg.drift.mounting_std == 20.0
    assert cfg.sweeps.passive.angles == (10.0, 20.0)
    assert cfg.sweeps.active == DEFAULT_CONFIG.sweeps.active


@pytest.mark.parametrize("doc, match", [
    ({"sed": 1}, "unknown key 'sed'"),
    ({"drift": {"rate": 1}}, "unknown key 'rate' in drift"),
    ({"sweeps": {"passive": {"angle": [1]}}}, "unknown key 'angle' in sweeps.passive"),
    ({"seed": 1.5}, "seed: expected an integer"),
    ({"strict": 1}, "strict: expected true/false"),
    ({"geometry": {"spacing_s": -1}}, "geometry"),
    ({"geometry": {"num_imus": 1}}, "num_imus"),
    ({"drift": {"noise_std": -0.1}}, "drift"),
    ({"drift": {"noise_std": "high"}}, "drift.noise_std: expected a finite number"),
    ({"sweeps": {"passive": {"angles": [95]}}}, r"sweeps.passive.angles: must lie in \[0, 90\]"),
    ({"sweeps": {"passive": {"angles": []}}}, "non-empty"),
    ({"sweeps": {"passive": {"shape": "spiral"}}}, "shape"),
    ({"sweeps": {"active": {"kappas": [0.2]}}}, "kappas"),
    ({"sweeps": {"length": {"lengths": [0]}}}, "lengths"),
    ({"sweeps": {"spacing": {"multiples": [0]}}}, "multiples"),
    ({"sweeps": {"drift": {"n_sensors": 0}}}, "n_sensors"),
    ({"sweeps": {"active": {"bend_radius_factor": 0}}}, "bend_radius_factor"),
    ([], "expected an object"),
])
def test_validation_errors_name_the_field(doc, match):
    with pytest.raises(ConfigError, match=match):
        config_from_dict(doc)


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "seed": 1,\n}\n')
    with pytest.raises(ConfigError, match="line 3"):
        load_config(path)


@pytest.mark.parametrize("kind", ["passive", "active", "length", "spacing"])
def test_settings_for_each_sweep(kind):
    s = DEFAULT_CONFIG.settings(kind)
    assert s.geometry == DEFAULT_CONFIG.geometry and s.drift == DEFAULT_CONFIG.drift
    ages = {"passive": 84.0, "active": 87.0, "length": 41.0, "spacing": 57.0}
    assert s.offset_age_s == ages[kind]


def test_settings_unknown_kind():
    with pytest.raises(ConfigError):
        DEFAULT_CONFIG.settings("drift")


def test_json_serialisable():
    json.dumps(config_to_dict(DEFAULT_CONFIG))
