import numpy as np
import pytest

from pitdn.errors import ConfigError, NonFiniteLossError, QuadratureDomainError
from pitdn.net import MlpConfig, ParamVector, init_xavier
from pitdn.objective import LossWeights
from pitdn.objectives import OBJECTIVES, PitdnObjective, PinnObjective, pitdn_loss, pinn_baseline_loss
from pitdn.volterra import QuadratureConfig

from setups import fields


def test_weights_validation():
    assert LossWeights().for_term('ic') == 10.0

    with pytest.raises(ConfigError):
        LossWeights(lambda_bc=-1.0)
    with pytest.raises(ConfigError):
        LossWeights(lambda_pde=float('nan'))

def test_registry():
    assert OBJECTIVES == { 'pitdn': PitdnObjective, 'pinn': PinnObjective }

def test_pitdn_exact_rate_advection():
    spec, colloc = fields.small_collocation('advection')
    report = PitdnObjective(spec, colloc).breakdown(fields.advection_rate)

    assert report.total < 1e-20
    assert report.as_dict().keys() == {'total', 'pde', 'bc', 'ic'}

def test_pinn_exact_solution():
    for name in ('advection', 'klein-gordon'):
        spec, colloc = fields.small_collocation(name)
        report = PinnObjective(spec, colloc).breakdown(spec.exact)

        assert report.total < 1e-18, name

def test_pitdn_klein_gordon_quadrature_refinement():
    spec, colloc = fields.small_collocation('klein-gordon')

    coarse = PitdnObjective(spec, colloc, q=QuadratureConfig(10)).breakdown(fields.kg_acceleration)
    fine   = PitdnObjective(spec, colloc, q=QuadratureConfig(80)).breakdown(fields.kg_acceleration)

    assert coarse.pde > 0
    assert fine.pde < coarse.pde / 10
    assert fine.ic < 1e-20

def test_pitdn_zero_field_burgers():
    spec, colloc = fields.small_collocation('burgers')
    report = PitdnObjective(spec, colloc).breakdown(fields.zero_field)

    assert np.isfinite(report.total)
    assert report.ic > 0
    assert report.total == pytest.approx(10.0 * report.ic + report.pde + report.bc)

def test_value_and_grad():
    spec, colloc = fields.small_collocation('burgers')
    objective = PitdnObjective(spec, colloc)
    params = init_xavier(MlpConfig(seed=2))

    report, grad = objective.value_and_grad(params.flat, params.layer_sizes)

    assert grad.shape == (261,)
    assert np.all(np.isfinite(grad))
    assert report.total == pytest.approx(objective.breakdown(params).total, rel=1e-12)

    report_again, grad_again = objective.closure(params.layer_sizes)(params.flat)
    assert report_again == report
    assert np.array_equal(grad_again, grad)

def test_value_and_grad_directional():
    spec, colloc = fields.small_collocation('advection')
    objective = PinnObjective(spec, colloc)
    params = init_xavier(MlpConfig(seed=8))

    _, grad = objective.value_and_grad(params.flat, params.layer_sizes)

    d = np.random.default_rng(0).standard_normal(params.count)
    h = 1e-6

    def total(theta):
        report, _ = objective.value_and_grad(theta, params.layer_sizes)
        return report.total

    fd = (total(params.flat + h*d) - total(params.flat - h*d)) / (2*h)
    assert grad @ d == pytest.approx(fd, rel=1e-5, abs=1e-8)

def test_non_finite_loss_located():
    spec, colloc = fields.small_collocation('advection')

    with pytest.raises(NonFiniteLossError) as info:
        PinnObjective(spec, colloc).breakdown(fields.nan_field)

    term, point = info.value.point
    assert term == 'pde'
    assert point == tuple(colloc.interior[0])

def test_pitdn_predict_reconstructs_state():
    spec, colloc = fields.small_collocation('advection')
    objective = PitdnObjective(spec, colloc, q=QuadratureConfig(100))
    x = np.linspace(0.0, 2*np.pi, 9)

    u0 = objective.predict(fields.advection_rate, x, np.zeros_like(x))
    u1 = objective.predict(fields.advection_rate, x, np.ones_like(x))

    assert np.allclose(u0, np.sin(x), atol=1e-15)
    assert np.allclose(u1, np.sin(x - 1.0), atol=1e-4)

    rate = objective.predict_rate(fields.advection_rate, x, np.ones_like(x))
    assert np.allclose(rate, -np.cos(x - 1.0))

def test_pinn_predict_rate():
    spec, colloc = fields.small_collocation('advection')
    objective = PinnObjective(spec, colloc)
    x = np.linspace(0.0, 2*np.pi, 7)
    t = np.linspace(0.0, 4.0, 7)

    assert np.allclose(objective.predict(spec.exact, x, t), np.sin(x - t))
    assert np.allclose(objective.predict_rate(spec.exact, x, t), -np.cos(x - t))

def test_loss_wrappers():
    spec, colloc = fields.small_collocation('advection')

    assert pitdn_loss(fields.advection_rate, spec, colloc).total < 1e-20
    assert pinn_baseline_loss(spec.exact, spec, colloc).total < 1e-20

    params = init_xavier(MlpConfig())
    assert pinn_baseline_loss(params, spec, colloc).total > 0

def zero_network():
    return ParamVector(np.zeros(261), MlpConfig().layer_sizes)

def test_pitdn_zero_network_advection():
    spec, colloc = fields.small_collocation('advection')
    report = PitdnObjective(spec, colloc).breakdown(zero_network())

    tb = colloc.boundary[:, 1]
    assert report.pde == 0.0
    assert report.ic == pytest.approx(np.mean(np.cos(colloc.initial)**2), rel=1e-12)
    assert report.bc == pytest.approx(np.mean(np.cos(spec.c * tb)**2), rel=1e-12)

def test_pinn_zero_network_burgers():
    spec, colloc = fields.small_collocation('burgers')
    report = PinnObjective(spec, colloc).breakdown(zero_network())

    assert report.pde == 0.0
    assert report.bc == 0.0
    assert report.ic == pytest.approx(np.mean(np.sin(np.pi * colloc.initial)**2), rel=1e-12)

def test_zero_weights_give_zero_total():
    none = LossWeights(0.0, 0.0, 0.0)
    params = init_xavier(MlpConfig(seed=3))

    for objective in (PitdnObjective, PinnObjective):
        spec, colloc = fields.small_collocation('burgers')
        report = objective(spec, colloc, none).breakdown(params)

        assert report.total == 0.0
        assert report.ic > 0

def test_pitdn_predict_beyond_horizon():
    spec, colloc = fields.small_collocation('advection')
    objective = PitdnObjective(spec, colloc)

    with pytest.raises(QuadratureDomainError):
        objective.predict(fields.advection_rate, np.array([1.0]), np.array([spec.domain.t_end + 0.5]))
