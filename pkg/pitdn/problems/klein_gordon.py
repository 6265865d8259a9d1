import math
from dataclasses import dataclass, field

from pitdn.diffcore import jet
from pitdn.diffcore.jet import Jet2
from pitdn.problem import ProblemSpec, Domain1D, source_value


PI = math.pi


@dataclass(frozen=True)
class KleinGordon(ProblemSpec):
    '''
    Nonlinear Klein-Gordon ``u_tt - u_xx + u^2 = f`` on ``[0, 1]`` with the manufactured
    standing wave ``u = sin(pi x) cos(2 pi t)``, so that

    .. code-block:: text

        f = -3 pi^2 sin(pi x) cos(2 pi t) + sin^2(pi x) cos^2(2 pi t)

    Written as ``u_tt + N[u] = 0`` with ``N[u] = -u_xx + u^2 - f``. The learned field is
    the acceleration ``a``; the differentiated residual is

    .. code-block:: text

        r_t = a_t - v_xx + 2 u v - f_t
    '''
    domain : Domain1D = field(default_factory=lambda: Domain1D(0.0, 1.0, 1.0))

    name           = 'klein-gordon'
    order          = 2
    state_channels = frozenset({'d_xx'})

    @property
    def has_exact(self):
        return True

    def ic_u0(self, x):
        return jet.sin(PI * x)

    def source_f(self, x, t):
        s = jet.sin(PI * x)
        c = jet.cos(2*PI * t)
        return -3*PI**2 * s * c + (s * c) * (s * c)

    def source_dfdt(self, x, t):
        s  = jet.sin(PI * x)
        c  = jet.cos(2*PI * t)
        sn = jet.sin(2*PI * t)
        return 6*PI**3 * s * sn - 4*PI * (s * s) * c * sn

    def exact(self, x, t):
        return jet.sin(PI * x) * jet.cos(2*PI * t)

    def exact_dt(self, x, t):
        return -2*PI * jet.sin(PI * x) * jet.sin(2*PI * t)

    def exact_dtt(self, x, t):
        return -4*PI**2 * jet.sin(PI * x) * jet.cos(2*PI * t)

    def operator_N(self, u: Jet2, x, t):
        return -u.d_xx + u.value * u.value - source_value(self.source_f, x, t)

    def operator_dNdt(self, u: Jet2, v: Jet2, x, t):
        return -v.d_xx + 2.0 * u.value * v.value - source_value(self.source_dfdt, x, t)


def klein_gordon_spec() -> KleinGordon:
    return KleinGordon()
