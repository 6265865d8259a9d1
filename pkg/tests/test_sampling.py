import numpy as np
import pytest

from pitdn.errors import ConfigError
from pitdn.problems import get_problem
from pitdn.sampling import CollocationCounts, CollocationSet, latin_hypercube, build_collocation

from setups import fields


def test_latin_hypercube_strata():
    n = 50
    pts = latin_hypercube(n, [(0.0, 1.0), (-2.0, 2.0)], seed=3)

    assert pts.shape == (n, 2)
    assert sorted(np.floor(pts[:, 0] * n).astype(int)) == list(range(n))
    assert sorted(np.floor((pts[:, 1] + 2.0) / 4.0 * n).astype(int)) == list(range(n))

def test_latin_hypercube_deterministic():
    a = latin_hypercube(20, [(0.0, 1.0)], seed=7)
    b = latin_hypercube(20, [(0.0, 1.0)], seed=7)
    c = latin_hypercube(20, [(0.0, 1.0)], seed=8)

    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

    with pytest.raises(ConfigError):
        latin_hypercube(0, [(0.0, 1.0)])

def test_collocation_layout():
    spec, colloc = fields.small_collocation('burgers')
    d = spec.domain

    assert colloc.interior.shape == (40, 2)
    assert colloc.boundary.shape == (10, 2)
    assert colloc.initial.shape == (10,)
    assert colloc.counts == fields.SMALL

    x, t = colloc.interior.T
    assert np.all((x >= d.x_lo) & (x <= d.x_hi))
    assert np.all((t > 0.0) & (t <= d.t_end))

    assert np.all(colloc.boundary[:5, 0] == d.x_lo)
    assert np.all(colloc.boundary[5:, 0] == d.x_hi)
    assert np.all((colloc.initial >= d.x_lo) & (colloc.initial <= d.x_hi))

def test_odd_boundary_split():
    spec = get_problem('advection')
    colloc = build_collocation(spec, CollocationCounts(10, 7, 5), seed=1)

    assert np.sum(colloc.boundary[:, 0] == spec.domain.x_lo) == 3
    assert np.sum(colloc.boundary[:, 0] == spec.domain.x_hi) == 4

def test_counts_validation():
    with pytest.raises(ConfigError):
        CollocationCounts(0, 10, 10)
    with pytest.raises(ConfigError):
        CollocationCounts(10, 1, 10)

def test_read_only():
    _, colloc = fields.small_collocation('advection')

    with pytest.raises(ValueError):
        colloc.interior[0, 0] = 1.0

def test_csv_roundtrip(tmp_path):
    _, colloc = fields.small_collocation('klein-gordon', seed=11)
    path = tmp_path / 'collocation.csv'
    colloc.to_csv(path)

    loaded = CollocationSet.from_csv(path, seed=11)
    assert np.array_equal(loaded.interior, colloc.interior)
    assert np.array_equal(loaded.boundary, colloc.boundary)
    assert np.array_equal(loaded.initial, colloc.initial)

    assert path.read_text().splitlines()[0] == 'x,t,kind'

def test_same_seed_same_bytes(tmp_path):
    _, a = fields.small_collocation('burgers', seed=5)
    _, b = fields.small_collocation('burgers', seed=5)
    _, c = fields.small_collocation('burgers', seed=6)

    a.to_csv(tmp_path / 'a.csv')
    b.to_csv(tmp_path / 'b.csv')
    c.to_csv(tmp_path / 'c.csv')

    assert (tmp_path / 'a.csv').read_bytes() == (tmp_path / 'b.csv').read_bytes()
    assert (tmp_path / 'a.csv').read_bytes() != (tmp_path / 'c.csv').read_bytes()
