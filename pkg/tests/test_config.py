"""Experiment configuration: parsing, validation, presets, realization."""

import json

import numpy as np
import pytest

from chanchart.config import (
    ConfigError,
    ExperimentConfig,
    PRESETS,
    STAGES,
    derive_seeds,
    preset,
)
from chanchart.evalmetrics import DEFAULT_K_GRID
from chanchart.rng import substream
from chanchart.synthgen import generate_trajectory


def _minimal_doc(**overrides):
    doc = {"scenario": {"kind": "loop", "n_samples": 50}}
    doc.update(overrides)
    return doc


# ---------------------------------------------------------------------------
# seeds


def test_derive_seeds_uses_stage_substreams():
    seeds = derive_seeds(42)
    assert set(seeds) == set(STAGES)
    for i, stage in enumerate(STAGES):
        assert seeds[stage] == substream(42, i)
    assert len(set(seeds.values())) == 4
    assert derive_seeds(42) == derive_seeds(42)
    assert derive_seeds(42) != derive_seeds(43)


def test_with_seed_root_rederives_only_seeds():
    cfg = preset("tiny")
    other = cfg.with_seed_root(9)
    assert other.seeds == derive_seeds(9)
    a, b = cfg.to_dict(), other.to_dict()
    a.pop("seeds"), b.pop("seeds")
    assert a == b


# ---------------------------------------------------------------------------
# parsing and defaults


def test_minimal_document_gets_defaults():
    cfg = ExperimentConfig.from_dict(_minimal_doc())
    assert cfg.scenario == {"kind": "loop", "n_samples": 50,
                            "geometry_samples": 50, "jitter_sigma": 0.05}
    assert cfg.encoder.n_init == 100 and cfg.encoder.init == "smart"
    assert cfg.mining.t_close == 100.0 and cfg.mining.per_anchor == 1
    assert cfg.training.epochs == 30 and cfg.training.split_ratio == 0.7
    assert cfg.k_grid == DEFAULT_K_GRID
    assert cfg.seeds == derive_seeds(0)
    assert cfg.baseline_mlp is True


def test_unknown_keys_rejected_everywhere():
    with pytest.raises(ConfigError, match="bogus"):
        ExperimentConfig.from_dict(_minimal_doc(bogus=1))
    with pytest.raises(ConfigError, match="bogus"):
        ExperimentConfig.from_dict(_minimal_doc(encoder={"bogus": 1}))
    with pytest.raises(ConfigError, match="bogus"):
        ExperimentConfig.from_dict(_minimal_doc(training={"bogus": 1}))
    with pytest.raises(ConfigError, match="bogus"):
        ExperimentConfig.from_dict(
            {"scenario": {"kind": "loop", "n_samples": 5, "bogus": 1}})


def test_seeds_section_must_be_complete():
    partial = {"trajectory": 1, "init": 2, "mining": 3}
    with pytest.raises(ConfigError, match="training"):
        ExperimentConfig.from_dict(_minimal_doc(seeds=partial))
    extra = derive_seeds(0)
    extra["extra"] = 7
    with pytest.raises(ConfigError, match="extra"):
        ExperimentConfig.from_dict(_minimal_doc(seeds=extra))


def test_type_checks_reject_bools_and_strings():
    with pytest.raises(ConfigError, match="encoder.n_init"):
        ExperimentConfig.from_dict(_minimal_doc(encoder={"n_init": True}))
    with pytest.raises(ConfigError, match="encoder.n_init"):
        ExperimentConfig.from_dict(_minimal_doc(encoder={"n_init": "5"}))
    with pytest.raises(ConfigError, match="t_close"):
        ExperimentConfig.from_dict(_minimal_doc(mining={"t_close": "fast"}))
    with pytest.raises(ConfigError, match="baseline.mlp"):
        ExperimentConfig.from_dict(_minimal_doc(baseline={"mlp": 1}))


def test_value_range_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(_minimal_doc(encoder={"init": "magic"}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(
            _minimal_doc(mining={"t_close": 10.0, "t_far": 5.0}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(_minimal_doc(training={"epochs": 0}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(_minimal_doc(training={"split_ratio": 1.0}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(_minimal_doc(eval={"k_grid": []}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(_minimal_doc(eval={"k_grid": [0.0]}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(
            {"scenario": {"kind": "loop", "n_samples": 1}})
    with pytest.raises(ConfigError, match="kind"):
        ExperimentConfig.from_dict({"scenario": {"kind": "hexagon"}})


def test_to_dict_round_trips():
    for name in PRESETS:
        cfg = ExperimentConfig.from_dict(PRESETS[name]())
        again = ExperimentConfig.from_dict(cfg.to_dict())
        assert again.to_dict() == cfg.to_dict()


def test_from_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(_minimal_doc()), encoding="utf-8")
    cfg = ExperimentConfig.from_file(str(path))
    assert cfg.scenario["n_samples"] == 50

    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="JSON"):
        ExperimentConfig.from_file(str(path))

    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError, match="object"):
        ExperimentConfig.from_file(str(path))


# ---------------------------------------------------------------------------
# presets


def test_preset_names_and_unknown():
    assert set(PRESETS) == {"default", "desk", "tiny"}
    with pytest.raises(ConfigError, match="unknown preset"):
        preset("nope")


def test_default_preset_is_full_size():
    cfg = preset("default")
    assert cfg.scenario["n_samples"] == 5910
    assert cfg.scenario["geometry_samples"] == 5910
    assert cfg.encoder.init == "smart"
    assert cfg.sample_rate() == 7.0


def test_tiny_preset_shape():
    cfg = preset("tiny")
    assert cfg.scenario["n_samples"] == 200
    assert cfg.scenario["geometry_samples"] == 2000
    assert cfg.encoder.init == "random"
    assert cfg.training.epochs == 3


# ---------------------------------------------------------------------------
# realization


def test_loop_scenario_with_sparser_sampling():
    cfg = preset("tiny")
    traj, radio, scat, n = cfg.scenario_objects()
    assert n == 200
    assert radio.m == 1024 and len(scat.points) == 6
    # geometry of the 2000-sample loop, walked with only 200 samples
    perimeter = (2000 - 1) * 0.2
    assert np.isclose(traj.sample_rate, 1.4 * 199 / perimeter)
    track = generate_trajectory(traj)
    assert track.shape[0] == 200


def test_desk_scenario_objects():
    cfg = preset("desk")
    traj, _, _, n = cfg.scenario_objects()
    assert n == 2000
    assert np.isclose(traj.sample_rate, 1.4 * 1999 / ((8865 - 1) * 0.2))
    track = generate_trajectory(traj)
    assert track.shape[0] == 2000


def test_explicit_scenario_round_trip():
    doc = {
        "scenario": {
            "kind": "explicit",
            "trajectory": {"waypoints": [[0.0, 0.0], [8.0, 0.0]],
                           "speed": 1.0, "sample_rate": 2.0},
            "radio": {"n_rows": 2, "n_cols": 2, "n_subcarriers": 3,
                      "bs_position": [1.0, 1.0, 5.0]},
            "scatterers": {"points": [[4.0, 9.0, 3.0]], "gains": [0.5]},
        },
    }
    cfg = ExperimentConfig.from_dict(doc)
    traj, radio, scat, n = cfg.scenario_objects()
    assert n is None
    assert traj.waypoints == [[0.0, 0.0], [8.0, 0.0]]
    assert traj.jitter_sigma == 0.0
    assert radio.m == 12 and radio.bs_position == (1.0, 1.0, 5.0)
    assert scat.gains == [0.5]
    assert cfg.sample_rate() == 2.0
    assert generate_trajectory(traj).shape[0] == 17

    bad = json.loads(json.dumps(doc))
    bad["scenario"]["radio"]["n_rows"] = 0
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(bad)


def test_mining_and_train_config_builders():
    cfg = preset("desk")
    mining = cfg.mining_config(2.0)
    assert mining.t_close == 100.0 and mining.t_far == 290.0
    assert mining.sample_rate == 2.0
    assert mining.per_anchor == 2
    assert mining.seed == cfg.seeds["mining"]
    tc = cfg.train_config()
    assert tc.epochs == 30 and tc.batch_size == 64
    assert tc.learning_rate == 3e-4 and tc.margin == 1.0
    assert tc.split_ratio == 0.7
    assert tc.seed == cfg.seeds["training"]
