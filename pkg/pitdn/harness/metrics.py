'''
Error metrics and the ``metrics.json`` record.
'''
import math
import logging
from dataclasses import dataclass, field

import numpy as np

from pitdn.errors import PitdnError, ShapeMismatchError
from pitdn.util.types import to_jsonable


logger = logging.getLogger(__name__)

REFERENCE_KINDS = ('analytic', 'fd-certified')

# key -> (accepted types, nullable)
METRICS_SCHEMA = {
    'problem'            : ((str,), False),
    'method'             : ((str,), False),
    'rel_l2'             : ((float, int), False),
    'rel_linf'           : ((float, int), False),
    'rel_l2_rate'        : ((float, int), True),
    'slices'             : ((dict,), False),
    'wall_clock_seconds' : ((float, int), False),
    'final_loss'         : ((float, int), True),
    'iterations'         : ((int,), False),
    'termination_reason' : ((str,), False),
    'reference'          : ((str,), False),
    'seed'               : ((int,), False),
    'config'             : ((dict,), False),
}


def _pair(pred, exact):
    pred  = np.asarray(pred, dtype=np.float64)
    exact = np.asarray(exact, dtype=np.float64)
    if pred.shape != exact.shape:
        raise ShapeMismatchError(f'prediction shape {pred.shape} does not match reference {exact.shape}')
    return pred, exact

def rel_l2(pred, exact) -> float:
    '''
    ``||pred - exact||_2 / ||exact||_2`` over all grid nodes.
    '''
    pred, exact = _pair(pred, exact)
    norm = np.linalg.norm(exact.ravel())
    if norm == 0:
        raise ValueError('relative L2 error is undefined for a zero reference field')
    return float(np.linalg.norm((pred - exact).ravel()) / norm)

def rel_linf(pred, exact) -> float:
    pred, exact = _pair(pred, exact)
    norm = np.max(np.abs(exact))
    if norm == 0:
        raise ValueError('relative max error is undefined for a zero reference field')
    return float(np.max(np.abs(pred - exact)) / norm)


@dataclass
class MetricsReport:
    problem            : str
    method             : str
    rel_l2             : float
    rel_linf           : float
    rel_l2_rate        : float | None = None
    slices             : dict[str, float] = field(default_factory=dict)
    wall_clock_seconds : float = 0.0
    final_loss         : float | None = None
    iterations         : int = 0
    termination_reason : str = ''
    reference          : str = 'analytic'
    seed               : int = 0
    config             : dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return to_jsonable(self)


def validate_metrics(record: dict):
    '''
    Check a ``metrics.json`` record against ``METRICS_SCHEMA``.

    Raises:
        PitdnError: listing every missing key, wrong type or non-finite error value.
    '''
    problems = []
    for key, (types, nullable) in METRICS_SCHEMA.items():
        if key not in record:
            problems.append(f'missing "{key}"')
            continue

        value = record[key]
        if value is None:
            if not nullable:
                problems.append(f'"{key}" may not be null')
            continue
        if isinstance(value, bool) or not isinstance(value, types):
            problems.append(f'"{key}" has type {type(value).__name__}')

    for key in ('rel_l2', 'rel_linf'):
        value = record.get(key)
        if isinstance(value, (int, float)) and not (math.isfinite(value) and value >= 0):
            problems.append(f'"{key}" must be finite and >= 0, got {value}')

    if record.get('reference') not in REFERENCE_KINDS:
        problems.append(f'"reference" must be one of {REFERENCE_KINDS}')

    for name, value in (record.get('slices') or {}).items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            problems.append(f'slice "{name}" is not a number')

    if problems:
        raise PitdnError('metrics record failed validation: ' + '; '.join(problems))
