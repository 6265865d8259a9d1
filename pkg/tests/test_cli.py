import json

import pytest

from pitdn.harness.cli import main, build_parser, load_run


TINY = '''
problem         = "advection"
method          = "pinn"
adam_iters      = 3
lbfgs_max_iters = 3
n_interior      = 20
n_boundary      = 6
n_initial       = 6
eval_nx         = 8
eval_nt         = 3
'''


def test_checks_pass():
    assert main(['check', 'wirtinger']) == 0
    assert main(['check', 'quadrature']) == 0

def test_reference_command(tmp_path):
    out = tmp_path / 'ref'
    assert main(['-q', 'reference', 'burgers', '--nx', '32', '--t-end', '0.5', '--verify', '--out', str(out)]) == 0

    assert (out / 'reference_grid.csv').exists()
    meta = json.loads((out / 'reference_meta.json').read_text())
    assert meta['nx'] == 32
    assert meta['richardson']['grids'] == [32, 64, 128]

def test_reference_unstable_step(tmp_path):
    assert main(['-q', 'reference', 'burgers', '--nx', '64', '--nt', '2', '--out', str(tmp_path)]) == 2

def test_equivalence_needs_checkpoint():
    assert main(['check', 'equivalence']) == 2

def test_train_then_check(tmp_path):
    config = tmp_path / 'tiny.toml'
    config.write_text(TINY)
    out = tmp_path / 'run'

    assert main(['-q', 'train', '--config', str(config), '--seed', '1', '--out', str(out)]) == 0

    record = json.loads((out / 'metrics.json').read_text())
    assert record['method'] == 'pinn'
    assert record['seed'] == 1

    status = main(['check', 'equivalence', '--checkpoint', str(out / 'checkpoint.bin')])
    assert status in (0, 1)

def test_bad_config_exits_with_error(tmp_path):
    config = tmp_path / 'bad.toml'
    config.write_text('learning_rate = 0.1\n')

    assert main(['-q', 'train', '--config', str(config), '--out', str(tmp_path)]) == 2

def test_parser_rejects_unknown_problem():
    with pytest.raises(SystemExit):
        build_parser().parse_args(['train', '--problem', 'heat'])

def test_equivalence_uses_recorded_run(tmp_path):
    config = tmp_path / 'tiny.toml'
    config.write_text(TINY.replace('"advection"', '"klein-gordon"') + 'm_per_unit_time = 7\n')
    out = tmp_path / 'run'

    assert main(['-q', 'train', '--config', str(config), '--out', str(out)]) == 0
    record = json.loads((out / 'metrics.json').read_text())

    run = load_run(out / 'checkpoint.bin')
    assert run['spec'].name == 'klein-gordon'
    assert run['q'].m_per_unit_time == 7
    assert run['final_loss'] == record['final_loss']

    assert load_run(out / 'checkpoint.bin', 'advection')['spec'].name == 'advection'
