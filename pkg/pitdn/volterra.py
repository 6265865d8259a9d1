'''
State reconstruction from a learned time-derivative field.

First order (``v`` approximates ``u_t``):

.. code-block:: text

    u(x, t) = u0(x) + int_0^t v(x, s) ds

Second order (``a`` approximates ``u_tt``), via the Cauchy repeated-integration kernel:

.. code-block:: text

    u(x, t) = u0(x) + v0(x) t + int_0^t (t - s) a(x, s) ds
    v(x, t) = v0(x)            + int_0^t          a(x, s) ds

Integrals use the composite trapezoidal rule on ``K = max(1, ceil(M t))`` uniform
subintervals of ``[0, t]``, where ``M`` is ``QuadratureConfig.m_per_unit_time``. Spatial
channels (``d_x``, ``d_xx``) are accumulated under the integral sign from the integrand's
own jets. Time channels are never taken from the discrete sums: by the Leibniz rule they
are set exactly to the integrand (or its partials) evaluated at ``(x, t)``.

For many query points at once, ``QuadratureBatch`` lays out every point's nodes in one flat
array and stores the trapezoid weights as a ``scipy.sparse`` matrix, so a reconstruction is
one batched field evaluation followed by a sparse product. Batches depend only on node
coordinates and can be reused across optimizer iterations.
'''
import math
import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from pitdn.diffcore import ops
from pitdn.diffcore.jet import Jet2, close_channels, as_jet
from pitdn.diffcore.tape import Var
from pitdn.errors import ConfigError, QuadratureDomainError


logger = logging.getLogger(__name__)

SPATIAL_CHANNELS = frozenset({'d_x', 'd_xx'})


@dataclass(frozen=True)
class QuadratureConfig:
    m_per_unit_time: int = 10

    def __post_init__(self):
        if int(self.m_per_unit_time) != self.m_per_unit_time or self.m_per_unit_time < 1:
            raise ConfigError(
                f'm_per_unit_time must be an integer >= 1, got {self.m_per_unit_time}'
            )


def subinterval_count(t, q: QuadratureConfig):
    '''
    ``K = max(1, ceil(M t))``, with ``M t`` rounded to 9 decimals first so that products
    like ``10 * 0.3`` do not gain a spurious extra subinterval.
    '''
    t = np.asarray(t, dtype=np.float64)
    k = np.ceil(np.round(q.m_per_unit_time * t, 9)).astype(np.int64)
    k = np.maximum(k, 1)

    return int(k) if k.ndim == 0 else k

def quadrature_nodes(t: float, q: QuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    '''
    Uniform trapezoid nodes and weights on ``[0, t]``.

    Returns:
        ``(nodes, weights)`` with ``K + 1`` entries each; weights sum to ``t``.
    '''
    if t < 0:
        raise QuadratureDomainError(f'quadrature requested on [0, {t}] with t < 0')

    k = subinterval_count(t, q)
    h = t / k

    nodes = np.linspace(0.0, t, k + 1)
    weights = np.full(k + 1, h)
    weights[0] = weights[-1] = h / 2

    return nodes, weights


def _check_domain(t, t_end):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise QuadratureDomainError(f'reconstruction requested at t < 0 (min t = {t.min()})')
    if t_end is not None and np.any(t > t_end + 1e-12):
        raise QuadratureDomainError(
            f'reconstruction requested at t = {t.max()} beyond the horizon T = {t_end}'
        )


class QuadratureBatch:
    '''
    Vectorized trapezoid layout for query points ``(x_i, t_i)``.

    Attributes:
        node_x, node_t: flat node coordinates (point ``i``'s nodes are contiguous)
        weights:        ``scipy.sparse`` CSR matrix, ``(n_points, n_nodes)``, trapezoid
                        weights mapping node values to ``int_0^t_i``
        kernel:         same sparsity, entries ``w (t_i - s)`` for the Cauchy kernel

    Queries with ``t < 0``, or beyond ``t_end`` when it is given, raise
    ``QuadratureDomainError``.
    '''
    def __init__(self, x, t, q: QuadratureConfig, t_end: float | None = None):
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        if x.shape != t.shape:
            raise ValueError(f'x and t shapes differ: {x.shape} vs {t.shape}')
        _check_domain(t, t_end)

        n      = x.size
        k      = np.atleast_1d(subinterval_count(t, q))
        counts = k + 1
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        ends   = starts + counts - 1
        total  = int(counts.sum())

        owner = np.repeat(np.arange(n), counts)
        local = np.arange(total) - np.repeat(starts, counts)
        h     = t / k

        node_t = local * np.repeat(h, counts)
        node_t[ends] = t

        w = np.repeat(h, counts)
        w[starts] *= 0.5
        w[ends]   *= 0.5

        cols = np.arange(total)
        self.weights = sp.csr_matrix((w, (owner, cols)), shape=(n, total))
        self.kernel  = sp.csr_matrix(
            (w * (np.repeat(t, counts) - node_t), (owner, cols)), shape=(n, total)
        )

        self.x       = x
        self.t       = t
        self.t_end   = t_end
        self.node_x  = np.repeat(x, counts)
        self.node_t  = node_t
        self.n_nodes = total

        logger.debug(f'Quadrature batch: {n} points, {total} nodes (max K = {k.max()})')

    def __len__(self):
        return self.x.size


def _on(part, n: int):
    if part is None or isinstance(part, Var):
        return part
    return np.broadcast_to(np.asarray(part, dtype=np.float64), (n,)).copy()

def _integrate(matrix, part, n_nodes):
    if part is None:
        return None
    return ops.spmatmul(matrix, _on(part, n_nodes))

def _sum(*parts):
    present = [p for p in parts if p is not None]
    if not present:
        return None

    out = present[0]
    for p in present[1:]:
        out = out + p
    return out

def _scale(part, factor):
    return None if part is None else part * factor

def _nodes_jet(field, batch: QuadratureBatch, spatial) -> Jet2:
    x = Jet2.variable(batch.node_x, 'x', spatial)
    s = Jet2.variable(batch.node_t, 't', spatial)
    return as_jet(field(x, s), spatial)

def _point_jet(field, batch: QuadratureBatch, channels) -> Jet2:
    x = Jet2.variable(batch.x, 'x', channels)
    t = Jet2.variable(batch.t, 't', channels)
    return as_jet(field(x, t), channels)

def _initial_jet(fn, batch: QuadratureBatch, spatial) -> Jet2:
    return as_jet(fn(Jet2.variable(batch.x, 'x', spatial)), spatial)

def _point_channels(channels) -> frozenset:
    needed = set()
    if 'd_xt' in channels:
        needed.add('d_x')
    if 'd_tt' in channels:
        needed.add('d_t')
    return close_channels(needed)

def _squeeze(jet: Jet2, scalar: bool) -> Jet2:
    return jet[0] if scalar else jet

def reconstruct1(
    v,
    u0,
    x,
    t,
    q          : QuadratureConfig,
    channels   = ('d_x', 'd_xx', 'd_t'),
    t_end      : float | None = None,
    batch      : QuadratureBatch | None = None,
    v_at_point : Jet2 | None = None,
) -> Jet2:
    '''
    First-order Volterra reconstruction.

    Parameters:
        v:          jet field ``(x, t) -> Jet2`` approximating ``u_t``
        u0:         initial condition, ``x -> Jet2``
        x, t:       query point(s); scalars or equally shaped 1D arrays
        channels:   channels wanted on the result
        t_end:      horizon ``T``; queries beyond it raise ``QuadratureDomainError``
        batch:      precomputed node layout for ``(x, t)``
        v_at_point: ``v`` already evaluated at ``(x, t)``, reused for the time channels

    Returns:
        ``Jet2`` for ``u``; ``d_t`` equals ``v(x, t)``, ``d_xt`` equals ``v_x(x, t)`` and
        ``d_tt`` equals ``v_t(x, t)``.
    '''
    if t_end is None and batch is not None:
        t_end = batch.t_end
    _check_domain(t, t_end)

    scalar   = np.ndim(x) == 0 and np.ndim(t) == 0
    channels = close_channels(channels)
    spatial  = channels & SPATIAL_CHANNELS
    batch    = batch or QuadratureBatch(x, t, q, t_end)
    n        = len(batch)

    nodes = _nodes_jet(v, batch, spatial)
    init  = _initial_jet(u0, batch, spatial)

    value = _on(init.value, n) + _integrate(batch.weights, nodes.value, batch.n_nodes)
    parts = {
        name: _sum(_on(init.raw(name), n), _integrate(batch.weights, nodes.raw(name), batch.n_nodes))
        for name in spatial
    }

    temporal = channels - SPATIAL_CHANNELS
    if temporal:
        point = v_at_point
        if point is None:
            point = _point_jet(v, batch, _point_channels(channels))

        if 'd_t' in temporal:
            parts['d_t'] = _on(point.value, n)
        if 'd_xt' in temporal:
            parts['d_xt'] = _on(point.raw('d_x'), n)
        if 'd_tt' in temporal:
            parts['d_tt'] = _on(point.raw('d_t'), n)

    return _squeeze(Jet2(value, parts, channels), scalar)

def reconstruct2(
    a,
    u0,
    v0,
    x,
    t,
    q          : QuadratureConfig,
    channels   = ('d_x', 'd_xx', 'd_t'),
    t_end      : float | None = None,
    batch      : QuadratureBatch | None = None,
    a_at_point : Jet2 | None = None,
) -> tuple[Jet2, Jet2]:
    '''
    Second-order reconstruction through the Cauchy kernel ``(t - s)``.

    Returns:
        ``(u, v)`` jets. ``u.d_t`` is the reconstructed velocity, ``u.d_tt`` and ``v.d_t``
        equal ``a(x, t)``.
    '''
    if t_end is None and batch is not None:
        t_end = batch.t_end
    _check_domain(t, t_end)

    scalar   = np.ndim(x) == 0 and np.ndim(t) == 0
    channels = close_channels(channels)
    spatial  = channels & SPATIAL_CHANNELS
    if 'd_xt' in channels:
        spatial = spatial | {'d_x'}

    batch = batch or QuadratureBatch(x, t, q, t_end)
    n     = len(batch)
    t_pts = batch.t

    nodes = _nodes_jet(a, batch, spatial)
    u_ini = _initial_jet(u0, batch, spatial)
    v_ini = _initial_jet(v0, batch, spatial)

    v_value = _on(v_ini.value, n) + _integrate(batch.weights, nodes.value, batch.n_nodes)
    u_value = (
        _on(u_ini.value, n) + _on(v_ini.value, n) * t_pts
        + _integrate(batch.kernel, nodes.value, batch.n_nodes)
    )

    v_parts, u_parts = {}, {}
    for name in spatial:
        v_parts[name] = _sum(
            _on(v_ini.raw(name), n),
            _integrate(batch.weights, nodes.raw(name), batch.n_nodes),
        )
        u_parts[name] = _sum(
            _on(u_ini.raw(name), n),
            _scale(_on(v_ini.raw(name), n), t_pts),
            _integrate(batch.kernel, nodes.raw(name), batch.n_nodes),
        )

    temporal = channels - SPATIAL_CHANNELS
    if temporal:
        point = a_at_point
        if point is None:
            point = _point_jet(a, batch, _point_channels(channels))

        if 'd_t' in temporal:
            u_parts['d_t'] = v_value
            v_parts['d_t'] = _on(point.value, n)
        if 'd_xt' in temporal:
            u_parts['d_xt'] = v_parts['d_x']
            v_parts['d_xt'] = _on(point.raw('d_x'), n)
        if 'd_tt' in temporal:
            u_parts['d_tt'] = _on(point.value, n)
            v_parts['d_tt'] = _on(point.raw('d_t'), n)

    u = Jet2(u_value, { k: u_parts.get(k) for k in channels }, channels)
    v = Jet2(v_value, { k: v_parts.get(k) for k in channels }, channels)

    return _squeeze(u, scalar), _squeeze(v, scalar)
