import math

import numpy as np
import pytest

from pitdn.diffcore import jet
from pitdn.diffcore.jet import Jet2
from pitdn.errors import ConfigError, QuadratureDomainError
from pitdn.volterra import (
    QuadratureConfig,
    QuadratureBatch,
    subinterval_count,
    quadrature_nodes,
    reconstruct1,
    reconstruct2,
)


def _zero(x):
    return 0.0 * x

def test_subinterval_count():
    q = QuadratureConfig(10)

    assert subinterval_count(0.3, q) == 3
    assert subinterval_count(0.31, q) == 4
    assert subinterval_count(1.0, q) == 10
    assert subinterval_count(0.0, q) == 1
    assert list(subinterval_count(np.array([0.05, 0.2, 4.0]), q)) == [1, 2, 40]

def test_quadrature_config():
    with pytest.raises(ConfigError):
        QuadratureConfig(0)
    with pytest.raises(ConfigError):
        QuadratureConfig(2.5)

def test_quadrature_nodes():
    nodes, weights = quadrature_nodes(0.7, QuadratureConfig(10))

    assert nodes.size == weights.size == 8
    assert nodes[0] == 0.0 and nodes[-1] == 0.7
    assert weights.sum() == pytest.approx(0.7, abs=1e-15)
    assert weights[0] == pytest.approx(0.05)

def test_batch_layout():
    x = np.array([0.1, 0.2, 0.3])
    t = np.array([0.05, 0.5, 1.0])
    batch = QuadratureBatch(x, t, QuadratureConfig(10))

    assert len(batch) == 3
    assert batch.n_nodes == 2 + 6 + 11
    assert batch.weights.shape == (3, batch.n_nodes)
    assert np.allclose(np.asarray(batch.weights.sum(axis=1)).ravel(), t)
    assert np.all(batch.node_t <= np.repeat(t, [2, 6, 11]))

def test_linear_integrand_exact():
    u = reconstruct1(lambda x, s: 0.0 * x + s, jet.sin, 0.3, 1.0, QuadratureConfig(10), channels=())

    assert np.ndim(u.value) == 0
    assert float(u.value) == pytest.approx(math.sin(0.3) + 0.5, abs=1e-14)

def test_second_order_convergence():
    def error(m):
        u = reconstruct1(lambda x, s: jet.cos(s) * (1.0 + 0.0 * x), _zero, 0.0, 1.0, QuadratureConfig(m), channels=())
        return abs(float(u.value) - math.sin(1.0))

    ratio = error(10) / error(20)
    assert 3.8 <= ratio <= 4.2

def test_spatial_channels():
    x = np.array([0.2, 1.1, 2.5])
    t = np.array([0.4, 0.8, 1.0])

    u = reconstruct1(
        lambda x, s: jet.sin(x) * jet.cos(s), jet.sin, x, t, QuadratureConfig(100),
        channels=('d_x', 'd_xx'),
    )

    assert np.allclose(u.value, np.sin(x) * (1 + np.sin(t)), atol=1e-4)
    assert np.allclose(u.d_x, np.cos(x) * (1 + np.sin(t)), atol=1e-4)
    assert np.allclose(u.d_xx, -np.sin(x) * (1 + np.sin(t)), atol=1e-4)

def test_time_channels_exact():
    x = np.array([0.2, 1.1, 2.5])
    t = np.array([0.4, 0.8, 1.0])

    def v(x, s):
        return jet.cos(x) * s

    u = reconstruct1(v, jet.sin, x, t, QuadratureConfig(), channels=('d_t', 'd_xt', 'd_tt'))
    at_point = v(Jet2.constant(x, ()), Jet2.constant(t, ()))

    assert np.array_equal(u.d_t, at_point.value)
    assert np.allclose(u.d_xt, -np.sin(x) * t, atol=1e-15)
    assert np.allclose(u.d_tt, np.cos(x), atol=1e-15)

def test_batch_reuse():
    x = np.linspace(0, 1, 5)
    t = np.linspace(0.1, 0.9, 5)
    q = QuadratureConfig()

    def v(x, s):
        return jet.sin(x + s)

    fresh  = reconstruct1(v, jet.cos, x, t, q, channels=('d_x',))
    reused = reconstruct1(v, jet.cos, x, t, q, channels=('d_x',), batch=QuadratureBatch(x, t, q))

    assert np.array_equal(fresh.value, reused.value)
    assert np.array_equal(fresh.d_x, reused.d_x)

def test_domain_errors():
    q = QuadratureConfig()

    with pytest.raises(QuadratureDomainError):
        reconstruct1(lambda x, s: s, _zero, 0.0, -0.1, q, channels=())
    with pytest.raises(QuadratureDomainError):
        reconstruct1(lambda x, s: s, _zero, 0.0, 1.5, q, channels=(), t_end=1.0)

def test_at_initial_time():
    u = reconstruct1(lambda x, s: jet.exp(s) + x, jet.sin, 0.4, 0.0, QuadratureConfig(), channels=())
    assert float(u.value) == pytest.approx(math.sin(0.4), abs=1e-15)

def test_second_order_constant_acceleration():
    x = np.array([0.2, 0.5])
    t = np.array([0.3, 0.9])

    u, v = reconstruct2(
        lambda x, s: 2.0 + 0.0 * x + 0.0 * s, jet.sin, jet.cos, x, t, QuadratureConfig(),
        channels=('d_t', 'd_tt'),
    )

    assert np.allclose(u.value, np.sin(x) + np.cos(x) * t + t * t, atol=1e-13)
    assert np.allclose(v.value, np.cos(x) + 2 * t, atol=1e-13)
    assert np.array_equal(u.d_t, v.value)
    assert np.allclose(u.d_tt, 2.0)
    assert np.allclose(v.d_t, 2.0)

def test_second_order_spatial_channels():
    x = np.array([0.25, 0.5, 0.8])
    t = np.array([0.2, 0.6, 1.0])

    u, v = reconstruct2(
        lambda x, s: 2.0 * jet.sin(math.pi * x) + 0.0 * s, _zero, _zero, x, t, QuadratureConfig(),
        channels=('d_x', 'd_xx'),
    )

    s = np.sin(math.pi * x)
    assert np.allclose(u.value, s * t * t, atol=1e-13)
    assert np.allclose(u.d_xx, -math.pi**2 * s * t * t, atol=1e-12)
    assert np.allclose(v.d_xx, -2 * math.pi**2 * s * t, atol=1e-12)

def test_sine_rate_error_bound():
    u = reconstruct1(lambda x, s: jet.sin(s) + 0.0 * x, _zero, 0.0, 1.0, QuadratureConfig(10), channels=())
    assert abs(float(u.value) - (1.0 - math.cos(1.0))) <= 8.33e-4

def test_second_order_linear_acceleration_error():
    '''
    For ``a = s`` the Cauchy integrand ``(1 - s) s`` is quadratic, so the trapezoid error
    is exactly ``h^2 / 12 |f'(1) - f'(0)| = 1 / 600`` at ``M = 10``.
    '''
    u, v = reconstruct2(lambda x, s: s + 0.0 * x, _zero, _zero, 0.0, 1.0, QuadratureConfig(10), channels=())

    assert abs(float(u.value) - 1.0 / 6.0) == pytest.approx(1.0 / 600.0, rel=1e-9)
    assert abs(float(u.value) - 1.0 / 6.0) <= 1.67e-3
    assert float(v.value) == pytest.approx(0.5, abs=1e-14)

def test_second_order_matches_nested_first_order():
    q = QuadratureConfig(10)

    def a(x, s):
        return jet.cos(s) + 0.0 * x

    u, _ = reconstruct2(a, _zero, _zero, 0.0, 1.0, q, channels=())

    nodes, weights = quadrature_nodes(1.0, q)
    inner  = reconstruct1(a, _zero, np.zeros_like(nodes), nodes, q, channels=())
    nested = float(weights @ inner.value)

    assert abs(float(u.value) - nested) <= 2e-3
    assert abs(float(u.value) - (1.0 - math.cos(1.0))) <= 2e-3

def test_batch_horizon():
    q = QuadratureConfig()
    x = np.array([0.1, 0.2])

    with pytest.raises(QuadratureDomainError):
        QuadratureBatch(x, np.array([0.5, 1.2]), q, t_end=1.0)

    batch = QuadratureBatch(x, np.array([0.5, 1.0]), q, t_end=1.0)
    assert batch.t_end == 1.0

    with pytest.raises(QuadratureDomainError):
        reconstruct2(lambda x, s: s, _zero, _zero, 0.3, 1.5, q, channels=(), t_end=1.0)
