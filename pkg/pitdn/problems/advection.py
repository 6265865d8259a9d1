import math
from dataclasses import dataclass, field

from pitdn.diffcore import jet
from pitdn.diffcore.jet import Jet2
from pitdn.problem import ProblemSpec, Domain1D


@dataclass(frozen=True)
class Advection(ProblemSpec):
    '''
    Linear advection ``u_t + c u_x = 0`` on ``[0, 2 pi]`` with ``u0 = sin(x)``.

    Dirichlet data is the exact trace ``sin(x - ct)`` on both walls; only the inflow wall
    ``x = 0`` is strictly required by the equation.
    '''
    c      : float    = 1.0
    domain : Domain1D = field(default_factory=lambda: Domain1D(0.0, 2*math.pi, 4.0))

    name  = 'advection'
    order = 1

    @property
    def params(self):
        return { 'c': self.c }

    @property
    def has_exact(self):
        return True

    def ic_u0(self, x):
        return jet.sin(x)

    def bc_g(self, x, t):
        return self.exact(x, t)

    def bc_dgdt(self, x, t):
        return self.exact_dt(x, t)

    def exact(self, x, t):
        return jet.sin(x - self.c * t)

    def exact_dt(self, x, t):
        return -self.c * jet.cos(x - self.c * t)

    def exact_dtt(self, x, t):
        return -self.c**2 * jet.sin(x - self.c * t)

    def operator_N(self, u: Jet2, x, t):
        return self.c * u.d_x

    def operator_dNdt(self, u: Jet2, v: Jet2, x, t):
        return self.c * v.d_x


def advection_spec(c: float = 1.0) -> Advection:
    return Advection(c=c)
