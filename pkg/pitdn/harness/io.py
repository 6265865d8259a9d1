'''
Artifact writers for experiment directories.

Floats are written with ``repr`` so every CSV round-trips exactly.
'''
import csv
import json
import logging
from pathlib import Path

import numpy as np

from pitdn.util.types import to_jsonable


logger = logging.getLogger(__name__)

HISTORY_COLUMNS    = ('iter', 'phase', 'total', 'pde', 'bc', 'ic')
GRID_COLUMNS       = ('x', 't', 'u_pred', 'u_ref', 'abs_err')
SLICE_COLUMNS      = ('t_slice', 'x', 'u_pred', 'u_ref')
COMPARISON_COLUMNS = ('method', 'rel_l2', 'rel_linf', 'wall_clock')


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value

def write_rows(path: str | Path, columns, rows) -> Path:
    '''
    Write ``rows`` (dicts keyed by ``columns``) as a CSV with a header line.
    '''
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with path.open('w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=list(columns))
        writer.writeheader()
        for row in rows:
            writer.writerow({ k: _cell(row[k]) for k in columns })

    logger.debug(f'Wrote "{path}"')
    return path

def read_rows(path: str | Path) -> list[dict]:
    with Path(path).open(newline='') as f:
        return list(csv.DictReader(f))

def write_json(path: str | Path, record) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(record), indent=2, allow_nan=False))

    logger.debug(f'Wrote "{path}"')
    return path

def write_history(path, history) -> Path:
    return write_rows(path, HISTORY_COLUMNS, (entry.row() for entry in history))

def write_grid(path, x, t, u_pred, u_ref) -> Path:
    '''
    Flatten a ``(nt, nx)`` prediction/reference pair into ``x,t,u_pred,u_ref,abs_err`` rows,
    time-major.
    '''
    X, T = np.meshgrid(x, t)
    columns = [X, T, u_pred, u_ref, np.abs(u_pred - u_ref)]
    flat = [np.asarray(c, dtype=np.float64).ravel() for c in columns]

    return write_rows(path, GRID_COLUMNS, (dict(zip(GRID_COLUMNS, row)) for row in zip(*flat)))

def write_slices(path, x, slices: dict) -> Path:
    '''
    ``slices`` maps each slice time to its ``(u_pred, u_ref)`` profiles over ``x``.
    '''
    def rows():
        for t_slice, (pred, ref) in slices.items():
            for xi, p, r in zip(x, pred, ref):
                yield { 't_slice': t_slice, 'x': xi, 'u_pred': p, 'u_ref': r }

    return write_rows(path, SLICE_COLUMNS, rows())
