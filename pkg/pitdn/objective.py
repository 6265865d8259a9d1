'''
Training objectives over a fixed collocation set.

An ``Objective`` turns a field (a trained network, or any jet closure ``(x, t) -> Jet2``)
into three families of squared point residuals (interior ``pde``, boundary ``bc`` and
initial ``ic``) and combines their means with ``LossWeights``:

.. code-block:: text

    total = lambda_pde * mean(pde) + lambda_bc * mean(bc) + lambda_icp * mean(ic)

The same code path serves plain evaluation and parameter gradients: when the field comes
from a ``ParamVector`` traced on a ``GradTape`` every residual is a tape variable and
``value_and_grad`` runs one reverse sweep over the whole composite (network, quadrature
sums, loss). Losses are full-batch and reduced in a fixed order, so repeated evaluations
are bit-identical.

Concrete objectives live in ``pitdn.objectives``.
'''
import logging
from dataclasses import dataclass, astuple
from abc import ABCMeta, abstractmethod

import numpy as np

from pitdn.diffcore import ops
from pitdn.diffcore.jet import Jet2, as_jet
from pitdn.diffcore.tape import GradTape, Var, value_of
from pitdn.errors import ConfigError, NonFiniteLossError
from pitdn.net import ParamVector, network_field
from pitdn.problem import ProblemSpec
from pitdn.sampling import CollocationSet
from pitdn.volterra import QuadratureConfig


logger = logging.getLogger(__name__)

TERMS = ('pde', 'bc', 'ic')


@dataclass(frozen=True)
class LossWeights:
    lambda_pde : float = 1.0
    lambda_bc  : float = 1.0
    lambda_icp : float = 10.0

    def __post_init__(self):
        for name, value in zip(('lambda_pde', 'lambda_bc', 'lambda_icp'), astuple(self)):
            if not value >= 0:
                raise ConfigError(f'{name} must be >= 0, got {value}')

    def for_term(self, term: str) -> float:
        return { 'pde': self.lambda_pde, 'bc': self.lambda_bc, 'ic': self.lambda_icp }[term]


@dataclass(frozen=True)
class LossBreakdown:
    total : float
    pde   : float
    bc    : float
    ic    : float

    def as_dict(self) -> dict[str, float]:
        return { 'total': self.total, 'pde': self.pde, 'bc': self.bc, 'ic': self.ic }


class Objective(metaclass=ABCMeta):
    '''
    Base objective bound to one problem, collocation set, weighting and quadrature rule.

    Subclasses implement ``residuals`` (per-point squared residuals per term) and the
    prediction methods used for evaluation.
    '''
    method: str

    def __init__(
        self,
        spec    : ProblemSpec,
        colloc  : CollocationSet,
        weights : LossWeights | None = None,
        q       : QuadratureConfig | None = None,
    ):
        if min(len(colloc.interior), len(colloc.boundary), len(colloc.initial)) == 0:
            raise ConfigError('collocation sets must be non-empty')

        self.spec    = spec
        self.colloc  = colloc
        self.weights = weights or LossWeights()
        self.q       = q or QuadratureConfig()

        self.xr, self.tr = colloc.interior[:, 0], colloc.interior[:, 1]
        self.xb, self.tb = colloc.boundary[:, 0], colloc.boundary[:, 1]
        self.x0          = colloc.initial
        self.t0          = np.zeros_like(self.x0)

    @abstractmethod
    def residuals(self, field) -> dict:
        '''
        Per-point squared residuals ``{'pde': ..., 'bc': ..., 'ic': ...}`` for ``field``.
        '''
        raise NotImplementedError

    @abstractmethod
    def predict(self, params, x, t) -> np.ndarray:
        '''
        State ``u`` predicted at the points ``(x, t)``.
        '''
        raise NotImplementedError

    def predict_rate(self, params, x, t) -> np.ndarray:
        '''
        Learned field (the network output itself) at the points ``(x, t)``.
        '''
        field = self._field(params)

        def rate(xs, ts):
            out = as_jet(field(Jet2.constant(xs, ()), Jet2.constant(ts, ())))
            return np.broadcast_to(value_of(out.value), xs.shape)

        return chunked(rate, x, t)

    def _field(self, params_or_field):
        if isinstance(params_or_field, ParamVector):
            return network_field(params_or_field)
        return params_or_field

    def _points(self, term: str) -> np.ndarray:
        if term == 'pde':
            return self.colloc.interior
        if term == 'bc':
            return self.colloc.boundary
        return np.column_stack([self.x0, self.t0])

    def _reduce(self, squared: dict, params=None):
        means = { term: ops.mean(squared[term]) for term in TERMS }
        total = sum(self.weights.for_term(term) * means[term] for term in TERMS)

        values = { term: float(value_of(means[term])) for term in TERMS }
        total_value = float(value_of(total))

        if not np.isfinite(total_value):
            point = None
            for term in TERMS:
                bad = np.flatnonzero(~np.isfinite(value_of(squared[term])))
                if bad.size:
                    point = (term, tuple(self._points(term)[bad[0]]))
                    break

            raise NonFiniteLossError(
                f'{self.method} loss evaluated to {total_value}',
                params=None if params is None else np.array(value_of(params.flat)),
                point=point,
            )

        return total, LossBreakdown(total_value, values['pde'], values['bc'], values['ic'])

    def loss(self, params: ParamVector):
        '''
        Scalar total for ``params`` (a tape variable when ``params`` is traced).
        '''
        total, _ = self._reduce(self.residuals(network_field(params)), params)
        return total

    __call__ = loss

    def breakdown(self, params_or_field) -> LossBreakdown:
        params = params_or_field if isinstance(params_or_field, ParamVector) else None
        _, report = self._reduce(self.residuals(self._field(params_or_field)), params)
        return report

    def value_and_grad(self, theta: np.ndarray, layer_sizes) -> tuple[LossBreakdown, np.ndarray]:
        '''
        Loss breakdown and gradient at the flat parameter array ``theta``.
        '''
        tape   = GradTape()
        traced = ParamVector(theta, layer_sizes).traced(tape)

        total, report = self._reduce(self.residuals(network_field(traced)), traced)
        if not isinstance(total, Var):
            return report, np.zeros_like(np.asarray(theta, dtype=np.float64))

        return report, tape.gradient(total, traced.flat)

    def closure(self, layer_sizes):
        '''
        ``theta -> (LossBreakdown, gradient)`` for the optimizers.
        '''
        def value_and_grad(theta):
            return self.value_and_grad(theta, layer_sizes)

        return value_and_grad


def square(residual):
    return residual * residual

def chunked(fn, x, t, chunk: int = 4096) -> np.ndarray:
    '''
    Apply ``fn(x, t)`` over 1D point arrays in chunks and concatenate the values.
    '''
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    t = np.asarray(t, dtype=np.float64).reshape(-1)

    out = [
        np.asarray(value_of(fn(x[i:i + chunk], t[i:i + chunk])), dtype=np.float64).reshape(-1)
        for i in range(0, x.size, chunk)
    ]
    return np.concatenate(out) if out else np.empty(0)
