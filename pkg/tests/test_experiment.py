import json

import numpy as np
import pytest

from pitdn.errors import CertificationError, NonFiniteLossError, TrainingAbortedError
from pitdn.harness import experiment, io
from pitdn.harness.config import ExperimentConfig
from pitdn.harness.experiment import run_experiment, compare, build_reference
from pitdn.harness.metrics import validate_metrics
from pitdn.net import load_checkpoint
from pitdn.optimizer import TrainReport
from pitdn.problems import get_problem
from pitdn.reference import GridSolution


def tiny(out_dir, **values):
    base = {
        'problem'         : 'advection',
        'method'          : 'pitdn',
        'adam_iters'      : 5,
        'lbfgs_max_iters' : 5,
        'n_interior'      : 30,
        'n_boundary'      : 10,
        'n_initial'       : 10,
        'eval_nx'         : 16,
        'eval_nt'         : 5,
        'out_dir'         : str(out_dir),
    }
    base.update(values)
    return ExperimentConfig.from_dict(base)


def test_run_writes_artifacts(tmp_path):
    metrics = run_experiment(tiny(tmp_path), progress=False)

    for name in ('collocation.csv', 'checkpoint.bin', 'loss_history.csv',
                 'solution_grid.csv', 'slices.csv', 'metrics.json'):
        assert (tmp_path / name).exists(), name
    assert not (tmp_path / 'error.json').exists()

    record = json.loads((tmp_path / 'metrics.json').read_text())
    validate_metrics(record)
    assert record['reference'] == 'analytic'
    assert record['rel_l2_rate'] is not None
    assert record['rel_l2'] == metrics.rel_l2
    assert set(record['slices']) == {'t=0', 't=1', 't=2', 't=3', 't=4'}

    assert len(io.read_rows(tmp_path / 'solution_grid.csv')) == 16 * 5
    assert len(io.read_rows(tmp_path / 'slices.csv')) == 5 * 16
    assert len(io.read_rows(tmp_path / 'collocation.csv')) == 50
    assert len(io.read_rows(tmp_path / 'loss_history.csv')) == record['iterations']

    params, seed = load_checkpoint(tmp_path / 'checkpoint.bin')
    assert params.count == 261
    assert seed == 0

def test_runs_are_reproducible(tmp_path):
    a = run_experiment(tiny(tmp_path / 'a', method='pinn'), progress=False)
    b = run_experiment(tiny(tmp_path / 'b', method='pinn'), progress=False)

    assert a.rel_l2 == b.rel_l2
    assert a.final_loss == b.final_loss
    assert (tmp_path / 'a' / 'collocation.csv').read_bytes() == (tmp_path / 'b' / 'collocation.csv').read_bytes()
    assert (tmp_path / 'a' / 'checkpoint.bin').read_bytes() == (tmp_path / 'b' / 'checkpoint.bin').read_bytes()

def test_compare_shares_collocation(tmp_path):
    results = compare(tiny(tmp_path, problem='klein-gordon', adam_iters=3, lbfgs_max_iters=3), progress=False)

    assert set(results) == {'pitdn', 'pinn'}

    rows = io.read_rows(tmp_path / 'comparison.csv')
    assert [row['method'] for row in rows] == ['pitdn', 'pinn']
    assert float(rows[0]['rel_l2']) == results['pitdn'].rel_l2

    assert (tmp_path / 'pitdn' / 'collocation.csv').read_bytes() == (tmp_path / 'pinn' / 'collocation.csv').read_bytes()

def test_burgers_reference(tmp_path):
    config = tiny(tmp_path, problem='burgers', reference_nx=256)
    reference = build_reference(get_problem('burgers'), config)

    assert reference.kind == 'fd-certified'
    assert reference.rate is None
    assert reference.details['richardson']['grids'] == [256, 512, 1024]
    assert reference.details['richardson']['certified'] is True
    assert reference.details['nx'] == 256

    x = np.array([-0.5, 0.0, 0.5])
    u0 = reference.state(x, np.zeros(3))
    assert np.allclose(u0, -np.sin(np.pi * x), atol=1e-2)

def test_uncertified_reference_stops_run(tmp_path, monkeypatch):
    def flat(nx, **kwargs):
        x = np.linspace(-1.0, 1.0, nx + 1)
        return GridSolution(x, np.array([0.0, 1.0]), np.zeros((2, nx + 1)))

    monkeypatch.setattr(experiment, 'burgers_fd_solve', flat)
    config = tiny(tmp_path, problem='burgers', reference_nx=16)

    with pytest.raises(CertificationError) as info:
        run_experiment(config, progress=False)

    assert info.value.report.flags == ['exact']
    assert not (tmp_path / 'collocation.csv').exists()
    assert not (tmp_path / 'metrics.json').exists()

def test_abort_writes_partial_artifacts(tmp_path, monkeypatch):
    def failing(*args, **kwargs):
        report = TrainReport(final_params=np.zeros(261), iterations_used=2)
        raise TrainingAbortedError('adam', NonFiniteLossError('boom'), report)

    monkeypatch.setattr(experiment, 'train', failing)

    with pytest.raises(TrainingAbortedError):
        run_experiment(tiny(tmp_path), progress=False)

    error = json.loads((tmp_path / 'error.json').read_text())
    assert error['phase'] == 'adam'
    assert error['error'] == 'NonFiniteLossError'
    assert error['message'] == 'boom'
    assert error['iterations'] == 2
    assert error['final_loss'] is None

    assert (tmp_path / 'checkpoint.bin').exists()
    assert (tmp_path / 'loss_history.csv').exists()
    assert not (tmp_path / 'metrics.json').exists()
