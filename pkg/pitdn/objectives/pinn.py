import logging
from functools import partial

import numpy as np

from pitdn.diffcore.jet import Jet2, as_jet
from pitdn.diffcore.tape import value_of
from pitdn.objective import Objective, square, chunked
from pitdn.problem import FieldBundle, eval_primal_residual, source_value


logger = logging.getLogger(__name__)


class PinnObjective(Objective):
    '''
    Standard physics-informed loss for a network that models ``u`` directly.

    - ``pde``: primal residual ``R^2`` at interior points
    - ``bc``: ``(u - g)^2`` at boundary points
    - ``ic``: ``(u(x, 0) - u0)^2``, plus ``(u_t(x, 0) - v0)^2`` for second-order problems
    '''
    method = 'pinn'

    def __init__(self, spec, colloc, weights=None, q=None):
        super().__init__(spec, colloc, weights, q)

        self.state_channels = ('d_x', 'd_xx', 'd_t')
        if spec.order == 2:
            self.state_channels += ('d_tt',)

        self.bc_target = source_value(spec.bc_g, self.xb, self.tb)
        self.u0 = np.asarray(as_jet(spec.ic_u0(Jet2.constant(self.x0, ()))).value)
        self.v0 = np.asarray(as_jet(spec.ic_v0(Jet2.constant(self.x0, ()))).value)

    def _at(self, field, x, t, channels=()):
        return as_jet(field(Jet2.variable(x, 'x', channels), Jet2.variable(t, 't', channels)), channels)

    def residuals(self, field) -> dict:
        spec = self.spec

        u = self._at(field, self.xr, self.tr, self.state_channels)
        R = eval_primal_residual(spec, FieldBundle(u=u), self.xr, self.tr)

        bc = self._at(field, self.xb, self.tb).value - self.bc_target

        if spec.order == 2:
            u_init = self._at(field, self.x0, self.t0, ('d_t',))
            ic = square(u_init.value - self.u0) + square(u_init.d_t - self.v0)
        else:
            u_init = self._at(field, self.x0, self.t0)
            ic = square(u_init.value - self.u0)

        return { 'pde': square(R), 'bc': square(bc), 'ic': ic }

    def _evaluate(self, field, x, t):
        return self._at(field, x, t).value

    def predict(self, params, x, t) -> np.ndarray:
        return chunked(partial(self._evaluate, self._field(params)), x, t)

    def predict_rate(self, params, x, t) -> np.ndarray:
        '''
        ``u_t`` (order 1) or ``u_tt`` (order 2) of the network at ``(x, t)``.
        '''
        channel = 'd_tt' if self.spec.order == 2 else 'd_t'
        field   = self._field(params)

        def rate(xs, ts):
            part = getattr(self._at(field, xs, ts, (channel,)), channel)
            return np.broadcast_to(value_of(part), xs.shape)

        return chunked(rate, x, t)


def pinn_baseline_loss(params, spec, colloc, w_pinn=None):
    '''
    Baseline PINN loss breakdown of ``params`` (or any jet field).
    '''
    return PinnObjective(spec, colloc, w_pinn).breakdown(params)
