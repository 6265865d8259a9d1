import json

import pytest

from pitdn.errors import ConfigError
from pitdn.harness.config import ExperimentConfig, FLAT_KEYS


def test_defaults():
    config = ExperimentConfig()

    assert config.mlp.layer_sizes == (2, 10, 10, 10, 1)
    assert config.schedule.adam_iters == 3000
    assert config.schedule.lbfgs_max_iters == 5000
    assert config.weights.lambda_icp == 10.0
    assert config.quadrature.m_per_unit_time == 10
    assert config.counts.n_interior == 5000

def test_seed_propagates():
    config = ExperimentConfig(seed=7)

    assert config.mlp.seed == 7
    assert config.schedule.seed == 7
    assert config.with_overrides(seed=None) is config
    assert config.with_overrides(seed=3).mlp.seed == 3

def test_flat_keys():
    config = ExperimentConfig.from_dict({
        'problem'     : 'burgers',
        'adam_iters'  : 12,
        'lambda_bc'   : 2.0,
        'n_interior'  : 100,
        'layer_sizes' : [2, 5, 1],
        'seed'        : 4,
    })

    assert config.problem == 'burgers'
    assert config.schedule.adam_iters == 12
    assert config.weights.lambda_bc == 2.0
    assert config.counts.n_interior == 100
    assert config.mlp.layer_sizes == (2, 5, 1)
    assert config.mlp.seed == 4
    assert 'seed' not in FLAT_KEYS

@pytest.mark.parametrize('values', [
    {'learning_rate': 0.1},
    {'problem': 'heat'},
    {'method': 'fem'},
    {'adam_lr': -1.0},
    {'m_per_unit_time': 0},
    {'reference_nx': 31},
])
def test_invalid_values(values):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(values)

def test_from_file_with_overrides(tmp_path):
    path = tmp_path / 'run.toml'
    path.write_text('problem = "klein-gordon"\nadam_iters = 40\nseed = 2\n')

    config = ExperimentConfig.from_file(path, method='pinn', seed=None, out_dir=str(tmp_path))

    assert config.problem == 'klein-gordon'
    assert config.method == 'pinn'
    assert config.seed == 2
    assert config.schedule.adam_iters == 40
    assert config.out_dir == str(tmp_path)

def test_bad_toml(tmp_path):
    path = tmp_path / 'bad.toml'
    path.write_text('problem = \n')

    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)

def test_to_dict_is_json():
    record = ExperimentConfig(problem='burgers').to_dict()

    assert json.loads(json.dumps(record)) == record
    assert record['mlp']['layer_sizes'] == [2, 10, 10, 10, 1]
    assert record['problem'] == 'burgers'
