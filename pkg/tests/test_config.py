import json

import pytest

from veristep.config import AppConfig, ConfigError, dump_config, load_config


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_defaults():
    cfg = load_config(None)
    assert cfg == AppConfig()
    assert cfg.reward.full_score == 1.0 and cfg.clip.eps_high == 0.28 and cfg.gateway.max_concurrent_requests == 8
    assert cfg.mode == "prosfi" and cfg.group_size == 8


def test_nested_sections(tmp_path):
    p = write(tmp_path, {
        "clip": {"eps_low": 0.1, "eps_high": 0.3},
        "gateway": {"base_url": "http://x/v1", "retry": {"max_attempts": 5}},
        "reward": {"option_score": 0.25},
        "mode": "outcome",
    })
    cfg = load_config(p)
    assert cfg.clip.eps_low == 0.1
    assert cfg.gateway.retry.max_attempts == 5 and cfg.gateway.retry.base_delay == 1.0
    assert cfg.reward.option_score == 0.25 and cfg.mode == "outcome"


def test_prover_section_reaches_reward(tmp_path):
    cfg = load_config(write(tmp_path, {"prover": {"max_ground_atoms": 77}}))
    assert cfg.reward.prover_limits.max_ground_atoms == 77


@pytest.mark.parametrize(
    "data",
    [
        {"unknown_key": 1},
        {"clip": {"eps_low": 0.5, "eps_high": 0.2}},
        {"mode": "other"},
        {"gateway": {"max_concurrent_requests": 0}},
        {"reward": {"option_score": 0.05}},
        {"serve": {"workers": 0}},
        {"seed": "abc"},
    ],
)
def test_invalid(tmp_path, data):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, data))


def test_paths_relative_to_config(tmp_path):
    (tmp_path / "data.jsonl").write_text("")
    cfg = load_config(write(tmp_path, {"dataset": "data.jsonl"}))
    assert cfg.dataset == str(tmp_path / "data.jsonl")
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(write(tmp_path, {"candidates": "missing.jsonl"}))
    assert load_config(write(tmp_path, {"candidates": "missing.jsonl"}), check_paths=False).candidates == "missing.jsonl"


def test_unreadable(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.json")


def test_dump_round_trip(tmp_path):
    cfg = AppConfig().with_overrides(seed=3, mode=None)
    assert cfg.seed == 3 and cfg.mode == "prosfi"
    p = tmp_path / "c.json"
    p.write_text(dump_config(cfg))
    assert load_config(p) == cfg
