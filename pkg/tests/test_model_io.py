import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from espnor.config import ConfigError, RunConfig, config_from_dict, load_config
from espnor.model_io import (
    InstanceParseError,
    InstanceValidationError,
    generate_synthetic_instance,
    instance_from_dict,
    load_instance,
    save_instance,
)


def test_round_trip_preserves_digest(tmp_path, inst_4e4o):
    path = tmp_path / "x.json"
    save_instance(inst_4e4o, path)
    again = load_instance(path)
    assert again.digest() == inst_4e4o.digest()
    assert np.array_equal(again.g_act, inst_4e4o.g_act)


@given(st.integers(2, 6), st.integers(0, 10_000))
def test_generated_instances_validate(n_ao, seed):
    n_act = min(4, n_ao)
    inst = generate_synthetic_instance(n_ao, n_act, seed)
    assert inst.N_A == 2 * inst.active.n_core + inst.n_alpha + inst.n_beta
    np.testing.assert_allclose(inst.C.T @ inst.S @ inst.C, np.eye(inst.n_mo), atol=1e-10)


def test_generator_is_seed_deterministic():
    a = generate_synthetic_instance(5, 4, 17)
    b = generate_synthetic_instance(5, 4, 17)
    assert a.dumps() == b.dumps()
    assert a.digest() != generate_synthetic_instance(5, 4, 18).digest()


def test_rejects_broken_symmetry(inst_2e2o):
    d = json.loads(inst_2e2o.dumps())
    d["S"][0][1] += 1e-3
    with pytest.raises(InstanceValidationError):
        instance_from_dict(d)


def test_rejects_wrong_electron_count(inst_2e2o):
    d = json.loads(inst_2e2o.dumps())
    d["N_A"] += 2
    with pytest.raises(InstanceValidationError):
        instance_from_dict(d)


def test_rejects_missing_field(inst_2e2o):
    d = json.loads(inst_2e2o.dumps())
    del d["C"]
    with pytest.raises(InstanceParseError):
        instance_from_dict(d)


def test_generator_bounds():
    with pytest.raises(ValueError):
        generate_synthetic_instance(3, 4, 0)


def test_config_loading(tmp_path):
    assert load_config(None) == RunConfig()
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"shots": 10, "noise": {"p1": 0.0, "p2": 0.01},
                             "zne": {"lambdas": [1, 3], "mode": "density_matrix"}}))
    cfg = load_config(p)
    assert cfg.shots == 10 and cfg.noise.p2 == 0.01 and cfg.zne.lambdas == (1.0, 3.0)
    assert config_from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("bad", [
    {"shots": 0},
    {"bogus": 1},
    {"noise": {"p1": 2.0, "p2": 0.0}},
    {"zne": {"lambdas": [2, 3]}},
    {"zne": {"lambdas": [1]}},
    {"zne": {"lambdas": [1, 3, 2]}},
    {"zne": {"analytic": True}},
    {"occupation_convention": "sideways"},
    {"optimizer": {"restarts": 0}},
])
def test_config_rejections(bad):
    with pytest.raises(ConfigError):
        config_from_dict(bad)
