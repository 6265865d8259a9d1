'''
Deterministic collocation sets.

Interior points are a Latin hypercube over ``Omega x (0, T]``; boundary points are split
evenly between the two walls with 1D-stratified times; initial points are stratified in
``x`` at ``t = 0``. A set is generated once per experiment and shared verbatim by every
method trained in it.
'''
import csv
import logging
from pathlib import Path
from dataclasses import dataclass

import numpy as np

from pitdn.errors import ConfigError
from pitdn.problem import ProblemSpec


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CollocationCounts:
    n_interior : int = 5000
    n_boundary : int = 500
    n_initial  : int = 500

    def __post_init__(self):
        for name in ('n_interior', 'n_boundary', 'n_initial'):
            if getattr(self, name) < 1:
                raise ConfigError(f'{name} must be positive, got {getattr(self, name)}')
        if self.n_boundary < 2:
            raise ConfigError(f'n_boundary must cover both walls, got {self.n_boundary}')


@dataclass(frozen=True, eq=False)
class CollocationSet:
    '''
    Attributes:
        interior: ``(N_r, 2)`` array of ``(x, t)``, ``t`` in ``(0, T]``
        boundary: ``(N_b, 2)`` array of ``(x, t)`` on the walls
        initial:  ``(N_0,)`` array of ``x`` (``t = 0`` implied)
        seed:     generating seed
    '''
    interior : np.ndarray
    boundary : np.ndarray
    initial  : np.ndarray
    seed     : int

    def __post_init__(self):
        for name in ('interior', 'boundary', 'initial'):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def counts(self) -> CollocationCounts:
        return CollocationCounts(len(self.interior), len(self.boundary), len(self.initial))

    def rows(self):
        '''
        ``(x, t, kind)`` rows in a fixed order: interior, boundary, initial.
        '''
        for x, t in self.interior:
            yield x, t, 'interior'
        for x, t in self.boundary:
            yield x, t, 'boundary'
        for x in self.initial:
            yield x, 0.0, 'initial'

    def to_csv(self, path: str | Path):
        path = Path(path)
        with path.open('w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(['x', 't', 'kind'])
            for x, t, kind in self.rows():
                writer.writerow([repr(float(x)), repr(float(t)), kind])

        logger.info(f'Wrote {len(self.interior)}/{len(self.boundary)}/{len(self.initial)} collocation points to "{path}"')

    @classmethod
    def from_csv(cls, path: str | Path, seed: int = 0) -> 'CollocationSet':
        groups = { 'interior': [], 'boundary': [], 'initial': [] }
        with Path(path).open(newline='') as f:
            for row in csv.DictReader(f):
                groups[row['kind']].append((float(row['x']), float(row['t'])))

        return cls(
            interior = np.array(groups['interior']).reshape(-1, 2),
            boundary = np.array(groups['boundary']).reshape(-1, 2),
            initial  = np.array([x for x, _ in groups['initial']]),
            seed     = seed,
        )


def latin_hypercube(n: int, bounds, seed: int | np.random.Generator = 0) -> np.ndarray:
    '''
    Latin hypercube design of ``n`` points in a box.

    Each axis is cut into ``n`` equal strata; every stratum holds exactly one point, the
    stratum order is an independent random permutation per axis, and the position inside
    a stratum is uniform.

    Parameters:
        n:      number of points, ``>= 1``
        bounds: ``[(lo, hi), ...]`` per axis
        seed:   integer seed or an existing generator

    Returns:
        ``(n, len(bounds))`` array
    '''
    if n < 1:
        raise ConfigError(f'latin_hypercube needs n >= 1, got {n}')

    rng    = np.random.default_rng(seed)
    bounds = np.asarray(bounds, dtype=np.float64).reshape(-1, 2)
    dim    = len(bounds)

    unit = np.empty((n, dim))
    for j in range(dim):
        unit[:, j] = (rng.permutation(n) + rng.random(n)) / n

    lo, hi = bounds[:, 0], bounds[:, 1]
    return lo + unit * (hi - lo)

def build_collocation(
    spec   : ProblemSpec,
    counts : CollocationCounts = CollocationCounts(),
    seed   : int = 0,
) -> CollocationSet:
    d = spec.domain
    interior_rng, boundary_rng, initial_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)
    )

    # strata on [0, 1) in t are mirrored so t lands in (0, T]
    interior = latin_hypercube(
        counts.n_interior, [(d.x_lo, d.x_hi), (0.0, 1.0)], interior_rng
    )
    interior[:, 1] = d.t_end * (1.0 - interior[:, 1])

    n_lo = counts.n_boundary // 2
    n_hi = counts.n_boundary - n_lo
    t_lo = latin_hypercube(n_lo, [(0.0, d.t_end)], boundary_rng)[:, 0]
    t_hi = latin_hypercube(n_hi, [(0.0, d.t_end)], boundary_rng)[:, 0]
    boundary = np.concatenate([
        np.column_stack([np.full(n_lo, d.x_lo), t_lo]),
        np.column_stack([np.full(n_hi, d.x_hi), t_hi]),
    ])

    initial = latin_hypercube(counts.n_initial, [(d.x_lo, d.x_hi)], initial_rng)[:, 0]

    logger.debug(
        f'Collocation for "{spec.name}" (seed {seed}): '
        f'{counts.n_interior} interior, {n_lo}+{n_hi} boundary, {counts.n_initial} initial'
    )

    return CollocationSet(interior, boundary, initial, seed)
