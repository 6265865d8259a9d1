import math
from dataclasses import dataclass, field

from pitdn.diffcore import jet
from pitdn.diffcore.jet import Jet2
from pitdn.problem import ProblemSpec, Domain1D


@dataclass(frozen=True)
class Burgers(ProblemSpec):
    '''
    Viscous Burgers ``u_t + u u_x - nu u_xx = 0`` on ``[-1, 1]``, ``u0 = -sin(pi x)``,
    homogeneous Dirichlet walls. With the default ``nu = 0.01/pi`` a steep front forms
    at ``x = 0`` around ``t = 0.4``. There is no closed form; see ``pitdn.reference``.

    The time derivative of the operator is the chain-rule expansion

    .. code-block:: text

        d/dt N[u] = v u_x + u v_x - nu v_xx,    v = u_t
    '''
    nu     : float    = 0.01 / math.pi
    domain : Domain1D = field(default_factory=lambda: Domain1D(-1.0, 1.0, 1.0))

    name           = 'burgers'
    order          = 1
    state_channels = frozenset({'d_x'})

    @property
    def params(self):
        return { 'nu': self.nu }

    def ic_u0(self, x):
        return -jet.sin(math.pi * x)

    def operator_N(self, u: Jet2, x, t):
        return u.value * u.d_x - self.nu * u.d_xx

    def operator_dNdt(self, u: Jet2, v: Jet2, x, t):
        return v.value * u.d_x + u.value * v.d_x - self.nu * v.d_xx


def burgers_spec(nu: float = 0.01 / math.pi) -> Burgers:
    return Burgers(nu=nu)
