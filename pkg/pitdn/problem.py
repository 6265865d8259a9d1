'''
PDE instances and residual evaluation.

A ``ProblemSpec`` bundles everything the solver needs to know about one evolution equation

.. code-block:: text

    u_t  + N[u] = 0        (order 1)
    u_tt + N[u] = 0        (order 2)

on ``Omega x (0, T]``: the domain, initial/boundary data and their time derivatives, any
source term, the spatial operator ``N`` and its hand-expanded time derivative
``d/dt N[u]``, plus the closed-form solution when one exists. Concrete problems live in
``pitdn.problems``.

Data functions follow the jet convention: they take ``Jet2`` coordinates (``ic_*``
functions take ``x`` only) and return ``Jet2``. They are written with the module-level
primitives of ``pitdn.diffcore.jet``, so the same functions also evaluate plain arrays.

Operators read the derivative channels they need from the field jets and return plain
values (arrays, or tape variables when the fields are parameter-traced).
'''
import logging
from dataclasses import dataclass
from abc import ABCMeta, abstractmethod

import numpy as np

from pitdn.diffcore.jet import Jet2, as_jet
from pitdn.errors import ConfigError, MissingExactSolutionError


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Domain1D:
    x_lo  : float
    x_hi  : float
    t_end : float

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise ConfigError(f'Domain requires x_lo < x_hi, got [{self.x_lo}, {self.x_hi}]')
        if not self.t_end > 0:
            raise ConfigError(f'Domain requires t_end > 0, got {self.t_end}')

    @property
    def length(self) -> float:
        return self.x_hi - self.x_lo


@dataclass
class FieldBundle:
    '''
    Field jets handed to the residual evaluators.

    Attributes:
        u: state (network output for the baseline, reconstruction otherwise); may be
           ``None`` for operators whose time derivative does not read the state
        v: first time derivative (network output for first-order problems, reconstructed
           velocity for second-order ones)
        a: second time derivative (network output for second-order problems)
    '''
    u : Jet2 | None
    v : Jet2 | None = None
    a : Jet2 | None = None


class ProblemSpec(metaclass=ABCMeta):
    '''
    Base PDE description.

    Subclasses set ``name``, ``order``, ``domain`` and ``params`` and implement the
    operator pair plus the data functions they need; optional data default to zero.

    ``state_channels`` names the spatial channels the differentiated residual reads from
    the reconstructed state (``None`` when it reads none and reconstruction can be skipped
    in the residual).
    '''
    name           : str
    order          : int
    domain         : Domain1D
    state_channels : frozenset | None = None

    @property
    def params(self) -> dict[str, float]:
        return {}

    @property
    def has_exact(self) -> bool:
        return False

    @abstractmethod
    def ic_u0(self, x: Jet2) -> Jet2:
        raise NotImplementedError

    def ic_v0(self, x: Jet2) -> Jet2:
        return 0.0 * x

    def bc_g(self, x: Jet2, t: Jet2) -> Jet2:
        return 0.0 * x

    def bc_dgdt(self, x: Jet2, t: Jet2) -> Jet2:
        return 0.0 * x

    def source_f(self, x: Jet2, t: Jet2) -> Jet2:
        return 0.0 * x

    def source_dfdt(self, x: Jet2, t: Jet2) -> Jet2:
        return 0.0 * x

    def exact(self, x: Jet2, t: Jet2) -> Jet2:
        raise MissingExactSolutionError(
            f'"{self.name}" has no closed-form solution; use the finite-difference reference'
        )

    def exact_dt(self, x: Jet2, t: Jet2) -> Jet2:
        return self.exact(x, t)

    def exact_dtt(self, x: Jet2, t: Jet2) -> Jet2:
        return self.exact(x, t)

    @abstractmethod
    def operator_N(self, u: Jet2, x, t):
        '''
        Spatial operator ``N[u]`` at ``(x, t)``.
        '''
        raise NotImplementedError

    @abstractmethod
    def operator_dNdt(self, u: Jet2, v: Jet2, x, t):
        '''
        ``d/dt N[u]`` given the state ``u`` and its time derivative ``v``.
        '''
        raise NotImplementedError

    def consistency(self, x) -> np.ndarray:
        '''
        ``-N[u0](x)``: the value the learned derivative field must take at ``t = 0``.
        '''
        u0 = as_jet(self.ic_u0(Jet2.variable(x, 'x', ('d_xx',))))
        t0 = np.zeros_like(np.asarray(x, dtype=np.float64))
        return -np.asarray(self.operator_N(u0, x, t0))


def _value(out):
    return out.value if isinstance(out, Jet2) else out

def source_value(fn, x, t):
    '''
    Evaluate a data function of ``(x, t)`` on plain coordinates and return its value.
    '''
    return _value(fn(Jet2.constant(x, ()), Jet2.constant(t, ())))

def eval_primal_residual(spec: ProblemSpec, fields: FieldBundle, x, t):
    '''
    ``R = u_t + N[u]`` (order 1) or ``R = u_tt + N[u]`` (order 2).

    For second-order problems the acceleration is read from ``fields.a`` when present,
    otherwise from the state's ``d_tt`` channel.
    '''
    u = fields.u
    if spec.order == 1:
        rate = u.d_t
    elif fields.a is not None:
        rate = fields.a.value
    else:
        rate = u.d_tt

    return rate + spec.operator_N(u, x, t)

def eval_diff_residual(spec: ProblemSpec, fields: FieldBundle, x, t):
    '''
    Time-differentiated residual ``r_t``.

    Order 1: ``fields.v`` is the learned ``u_t`` jet (``d_t`` and the spatial channels
    ``d/dt N`` reads) and ``fields.u`` the reconstructed state. Order 2: ``fields.a`` is the
    learned ``u_tt`` jet, ``fields.u``/``fields.v`` the reconstructed state and velocity.
    '''
    if spec.order == 1:
        return fields.v.d_t + spec.operator_dNdt(fields.u, fields.v, x, t)

    return fields.a.d_t + spec.operator_dNdt(fields.u, fields.v, x, t)
