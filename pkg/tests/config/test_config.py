#!/usr/bin/env python
"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

from pathlib import Path

import pytest
import yaml

from evotrain.config import (ExperimentConfig, config_from_document, load_config)
from evotrain.constants import ExperimentKind, OptimizerKind, ScheduleKind
from evotrain.errors import ConfigError, DataError

ROOT = Path(__file__).resolve().parents[2]

EXAMPLE = """
experiment:
  kind: shade-ils
  runs: 3
  base_seed: 7
data:
  source: synthetic
  classes: 2
  image_hw: [8, 8]
network:
  spec: specs/smoke.yaml
solver: {np_size: 4, n_eval: 20, epochs: 2, bounds: [-2, 2]}
schedule: {kinds: [full, a-up]}
search: {lambda: 6, mu: 3, max_depth: 8}
"""


def test_defaults():
    config = config_from_document(None)
    assert config == ExperimentConfig()
    assert config.kind is ExperimentKind.GRADIENT_TRAIN
    assert config.seeds == [0, 1, 2, 3, 4]


def test_load_from_text():
    config = load_config(EXAMPLE)

    assert config.kind is ExperimentKind.SHADE_ILS_TRAIN
    assert config.seeds == [7, 8, 9]
    assert config.data.image_hw == (8, 8)
    assert config.solver.bounds == (-2, 2)
    assert config.schedule.kinds == (ScheduleKind.FULL, ScheduleKind.A_UP)
    assert config.search.lambda_ == 6
    assert config.search.space.max_depth == 8
    assert config.network.spec == "specs/smoke.yaml"


def test_load_from_path_resolves_relative(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(EXAMPLE)

    config = load_config(path)
    assert config.network.spec == str(tmp_path / "specs" / "smoke.yaml")

    assert load_config(str(path)) == config


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_load_bad_yaml():
    with pytest.raises(ConfigError):
        load_config("experiment: [1,\nruns: 2")


@pytest.mark.parametrize("doc", [
    [1, 2],
    {'experiments': {}},
    {'experiment': {'kind': 'anneal'}},
    {'experiment': {'runs': 0}},
    {'experiment': {'base_seed': -1}},
    {'experiment': {'threads': 0}},
    {'experiment': 'gradient'},
    {'experiment': {'runs': 'five'}},
    {'data': {'image_hw': 28}},
    {'data': {'source': 'idx', 'train_images': 3, 'train_labels': 'b'}},
    {'solver': {'bounds': 1.0}},
    {'solver': 'fast'},
    {'data': {'source': 'csv'}},
    {'data': {'source': 'idx'}},
    {'data': {'source': 'idx', 'train_images': 'a', 'train_labels': 'b', 'test_images': 'c'}},
    {'data': {'train_size': 0}},
    {'data': {'shuffle': True}},
    {'network': {'spec': 'a.yaml', 'architecture': 'mnist'}},
    {'training': {'optimizer': 'lion'}},
    {'training': {'seed': 3}},
    {'training': {'learning_rate': 0}},
    {'solver': {'np_size': 2}},
    {'solver': {'local_searches': ['newton']}},
    {'schedule': {'kinds': ['sideways']}},
    {'schedule': {'kinds': []}},
    {'search': {'lambda': 2, 'mu': 5}},
    {'search': {'max_depth': 2}},
    {'search': {'seed': 1}},
])
def test_invalid_documents(doc):
    with pytest.raises(ConfigError):
        config_from_document(doc)


def test_schedule_single_kind():
    config = config_from_document({'schedule': {'kinds': 'down'}})
    assert config.schedule.kinds == (ScheduleKind.DOWN,)


def test_training_section():
    config = config_from_document({'training': {'optimizer': 'rmsprop', 'learning_rate': 0.01, 'epochs': 4}})
    assert config.training.optimizer is OptimizerKind.RMSPROP
    assert config.training.epochs == 4


def test_validate_needs_network():
    config = config_from_document({'experiment': {'kind': 'gradient'}})
    with pytest.raises(ConfigError):
        config.validate()


def test_validate_missing_spec(tmp_path):
    config = config_from_document({'network': {'spec': 'nope.yaml'}}, tmp_path)
    with pytest.raises(ConfigError):
        config.validate()


def test_validate_missing_data(tmp_path):
    (tmp_path / "net.yaml").write_text("input_shape: [8, 8, 1]\nlayers: [{kind: flatten}, {kind: dense, units: 2}]\n")
    config = config_from_document({
        'network': {'spec': 'net.yaml'},
        'data': {'source': 'idx', 'train_images': 'x.idx', 'train_labels': 'y.idx'},
    }, tmp_path)
    with pytest.raises(DataError):
        config.validate()


def test_validate_ok():
    config = load_config(ROOT / "configs" / "smoke.yaml")
    assert config.validate() is config


def test_with_overrides():
    config = load_config(EXAMPLE)
    changed = config.with_overrides(seed=100, runs=1, threads=2, fast=True)

    assert changed.seeds == [100]
    assert changed.experiment.threads == 2
    assert changed.search.fast
    assert changed.solver == config.solver
    assert config.with_overrides() == config


def test_resolved_is_plain_yaml():
    config = load_config(EXAMPLE)
    resolved = config.resolved()

    assert resolved['experiment']['kind'] == 'shade-ils'
    assert resolved['schedule']['kinds'] == ['full', 'a-up']
    assert resolved['search']['lambda'] == 6
    assert resolved['search']['max_depth'] == 8
    assert 'seed' not in resolved['solver']
    assert 'lambda_' not in resolved['search']

    text = yaml.safe_dump(resolved)
    reparsed = config_from_document(yaml.safe_load(text))
    assert reparsed == config


@pytest.mark.parametrize("name", ["adam-mnist", "shade-ils-mnist", "shade-ils-reduced", "topo-mnist",
    "random-topo-mnist", "smoke"])
def test_shipped_configs_parse(name):
    config = load_config(ROOT / "configs" / f"{name}.yaml")
    assert config.experiment.runs >= 1
