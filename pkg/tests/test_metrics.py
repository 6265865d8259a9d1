import json

import numpy as np
import pytest

from pitdn.errors import PitdnError, ShapeMismatchError
from pitdn.harness.metrics import MetricsReport, rel_l2, rel_linf, validate_metrics


def report(**changes):
    base = MetricsReport(
        problem='advection', method='pitdn', rel_l2=1e-3, rel_linf=2e-3,
        slices={'t=0': 1e-4, 't=1': 2e-3}, final_loss=1e-6, iterations=10,
        termination_reason='iteration cap', config={'adam_iters': 5},
    )
    record = base.to_dict()
    record.update(changes)
    return record


def test_relative_errors():
    exact = np.array([3.0, 4.0])

    assert rel_l2(exact, exact) == 0.0
    assert rel_l2(np.zeros(2), exact) == 1.0
    assert rel_l2([1.0, 1.0], [1.0, 0.0]) == 1.0
    assert rel_linf([3.0, 2.0], exact) == 0.5

def test_relative_error_guards():
    with pytest.raises(ValueError):
        rel_l2(np.ones(3), np.zeros(3))
    with pytest.raises(ValueError):
        rel_linf(np.ones(3), np.zeros(3))
    with pytest.raises(ShapeMismatchError):
        rel_l2(np.ones(3), np.ones((3, 1)))

def test_valid_record_roundtrips():
    record = report()

    validate_metrics(record)
    validate_metrics(json.loads(json.dumps(record)))
    assert record['rel_l2_rate'] is None
    assert record['reference'] == 'analytic'

@pytest.mark.parametrize('changes', [
    {'rel_l2': None},
    {'rel_l2': float('nan')},
    {'rel_linf': -1.0},
    {'iterations': 2.5},
    {'iterations': True},
    {'reference': 'guess'},
    {'slices': {'t=0': 'small'}},
    {'config': []},
])
def test_invalid_records(changes):
    with pytest.raises(PitdnError):
        validate_metrics(report(**changes))

def test_missing_key():
    record = report()
    del record['seed']

    with pytest.raises(PitdnError, match='missing "seed"'):
        validate_metrics(record)
