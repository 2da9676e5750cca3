"""Config schema validation and YAML loading diagnostics."""

import pytest

from capsim.config import (
    ConfigError,
    ExperimentConfig,
    ScenarioConfig,
    load_config,
    validate_config,
)


def test_defaults_mirror_evaluation_design():
    cfg = ExperimentConfig()
    assert cfg.runs == 35
    assert cfg.scenario.node_count == 50
    assert cfg.scenario.sm == 2
    assert cfg.scenario.area_m == (200.0, 200.0)
    assert cfg.scenario.rounds.round_count() == 14
    assert cfg.scenario.channel.hop_delay_s == 0.002
    assert cfg.run_until_s == 900.0
    assert cfg.protocol.warmup_duration_s == 60.0
    assert cfg.radio.e_elec_j_per_bit == 50e-9
    assert cfg.modes == ["multi_task", "single_task"]


def test_demand_labels():
    assert ScenarioConfig(sm=2).demand == "A"
    assert ScenarioConfig(sm=4).demand == "B"
    assert ScenarioConfig(sm=3).demand == "sm3"


def test_dispatch_sm_per_mode():
    cfg = ExperimentConfig.model_validate({"scenario": {"sm": 4}})
    assert cfg.dispatch_sm("multi_task") == 4
    assert cfg.dispatch_sm("single_task") == 1


def test_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="node_cout"):
        validate_config({"scenario": {"node_cout": 50}})


def test_rejects_bad_values():
    with pytest.raises(ConfigError):
        validate_config({"scenario": {"sm": 0}})
    with pytest.raises(ConfigError):
        validate_config({"runs": 0})
    with pytest.raises(ConfigError):
        validate_config({"modes": []})
    with pytest.raises(ConfigError):
        validate_config({"scenario": {"caps_per_class": [6, 2]}})
    with pytest.raises(ConfigError):
        validate_config({"scenario": {"quorum_range": [0, 3]}})


def test_rejects_dispatch_before_warmup_end():
    with pytest.raises(ConfigError, match="warm-up"):
        validate_config({"scenario": {"rounds": {"first_dispatch_s": 30.0}}})


def test_load_valid_yaml(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(
        "scenario:\n  node_count: 12\n  sm: 2\nruns: 3\nmodes: [multi_task]\n"
    )
    cfg = load_config(path)
    assert cfg.scenario.node_count == 12
    assert cfg.runs == 3
    assert cfg.modes == ["multi_task"]


def test_load_reports_yaml_line(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("scenario:\n  node_count: 12\n   sm: 2\n")
    with pytest.raises(ConfigError, match=r"broken\.yaml:"):
        load_config(path)


def test_load_reports_field_path_and_line(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("scenario:\n  node_count: -3\n")
    with pytest.raises(ConfigError, match=r"bad\.yaml:2: scenario\.node_count"):
        load_config(path)


def test_load_reports_line_inside_nested_list(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("runs: 5\nmodes:\n  - multi_task\n  - warp_speed\n")
    with pytest.raises(ConfigError, match=r"bad\.yaml:4: modes\.1"):
        load_config(path)


def test_load_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/config.yaml")


def test_empty_document_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_config(path) == ExperimentConfig()
