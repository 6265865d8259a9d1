import logging
from functools import partial

import numpy as np

from pitdn.diffcore.jet import Jet2, as_jet
from pitdn.objective import Objective, square, chunked
from pitdn.problem import FieldBundle, eval_diff_residual, source_value
from pitdn.volterra import QuadratureBatch, reconstruct1, reconstruct2


logger = logging.getLogger(__name__)

RATE_CHANNELS = ('d_x', 'd_xx', 'd_t')


class PitdnObjective(Objective):
    '''
    Differentiated-residual loss for a network that models ``u_t`` (order 1) or ``u_tt``
    (order 2).

    - ``pde``: ``r_t^2`` at interior points, with the state reconstructed through the
      Volterra operator wherever ``d/dt N`` reads it
    - ``bc``: order 1 compares the network trace with ``g_t``; order 2 compares the
      reconstructed state with ``g``
    - ``ic``: ``(net(x, 0) + N[u0](x))^2``, the consistency condition at ``t = 0``

    Quadrature node layouts for the interior and boundary sets are built once and reused
    on every evaluation.
    '''
    method = 'pitdn'

    def __init__(self, spec, colloc, weights=None, q=None):
        super().__init__(spec, colloc, weights, q)

        self.t_end          = spec.domain.t_end
        self.consistency    = spec.consistency(self.x0)
        self.interior_batch = QuadratureBatch(self.xr, self.tr, self.q, self.t_end)
        self.boundary_batch = None
        self.bc_target      = source_value(
            spec.bc_g if spec.order == 2 else spec.bc_dgdt, self.xb, self.tb
        )

        if spec.order == 2:
            self.boundary_batch = QuadratureBatch(self.xb, self.tb, self.q, self.t_end)

    def _at(self, field, x, t, channels=()):
        return as_jet(field(Jet2.variable(x, 'x', channels), Jet2.variable(t, 't', channels)), channels)

    def residuals(self, field) -> dict:
        spec = self.spec

        if spec.order == 1:
            rate  = self._at(field, self.xr, self.tr, RATE_CHANNELS)
            state = None
            if spec.state_channels is not None:
                state = reconstruct1(
                    field, spec.ic_u0, self.xr, self.tr, self.q,
                    channels=spec.state_channels, t_end=self.t_end,
                    batch=self.interior_batch,
                )
            fields = FieldBundle(u=state, v=rate)
            bc = self._at(field, self.xb, self.tb).value - self.bc_target
        else:
            accel = self._at(field, self.xr, self.tr, ('d_t',))
            state, velocity = reconstruct2(
                field, spec.ic_u0, spec.ic_v0, self.xr, self.tr, self.q,
                channels=spec.state_channels, t_end=self.t_end,
                batch=self.interior_batch,
            )
            fields = FieldBundle(u=state, v=velocity, a=accel)

            boundary_state, _ = reconstruct2(
                field, spec.ic_u0, spec.ic_v0, self.xb, self.tb, self.q,
                channels=(), t_end=self.t_end, batch=self.boundary_batch,
            )
            bc = boundary_state.value - self.bc_target

        r_t = eval_diff_residual(spec, fields, self.xr, self.tr)
        ic  = self._at(field, self.x0, self.t0).value - self.consistency

        return { 'pde': square(r_t), 'bc': square(bc), 'ic': square(ic) }

    def _reconstruct(self, field, x, t):
        spec = self.spec
        if spec.order == 1:
            return reconstruct1(field, spec.ic_u0, x, t, self.q, channels=(), t_end=self.t_end).value

        u, _ = reconstruct2(field, spec.ic_u0, spec.ic_v0, x, t, self.q, channels=(), t_end=self.t_end)
        return u.value

    def predict(self, params, x, t) -> np.ndarray:
        return chunked(partial(self._reconstruct, self._field(params)), x, t)


def pitdn_loss(params, spec, colloc, w=None, q=None):
    '''
    Differentiated-residual loss breakdown of ``params`` (or any jet field).
    '''
    return PitdnObjective(spec, colloc, w, q).breakdown(params)
