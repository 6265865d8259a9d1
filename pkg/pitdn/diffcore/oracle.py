'''
Finite-difference oracles for jets and parameter gradients.

Both helpers compare the exact derivatives produced by the engine against central
differences and return a small report; they are used by the test suite and by the
``check gradients`` command.
'''
import logging
from dataclasses import dataclass, field
from collections.abc import Callable

import numpy as np

from pitdn.diffcore.jet import Jet2, close_channels, jet_eval
from pitdn.diffcore.tape import param_gradient, value_of


logger = logging.getLogger(__name__)

_FIRST_ORDER  = ('d_x', 'd_t')
_SECOND_ORDER = ('d_xx', 'd_xt', 'd_tt')

REL_FLOOR = 1e-12


@dataclass
class OracleReport:
    passed    : bool
    max_error : dict[str, float] = field(default_factory=dict)
    n_checked : int = 0


def _plain(f, x, t) -> float:
    out = f(Jet2.constant(x, ()), Jet2.constant(t, ()))
    if isinstance(out, Jet2):
        out = out.value
    return float(value_of(out))

def _cross(f, x, t, h):
    return (
        _plain(f, x + h, t + h) - _plain(f, x + h, t - h)
        - _plain(f, x - h, t + h) + _plain(f, x - h, t - h)
    ) / (4*h*h)

def fd_partials(f, x: float, t: float, h: float = 1e-3) -> dict[str, float]:
    '''
    Fourth-order central-difference estimates of all five partials of the jet function
    ``f`` at ``(x, t)``. The mixed partial is the Richardson combination of the
    four-point stencil at ``h`` and ``2h``.
    '''
    f0 = _plain(f, x, t)
    fx = [_plain(f, x + k*h, t) for k in (-2, -1, 1, 2)]
    ft = [_plain(f, x, t + k*h) for k in (-2, -1, 1, 2)]

    def first(m2, m1, p1, p2):
        return (m2 - 8*m1 + 8*p1 - p2) / (12*h)

    def second(m2, m1, p1, p2):
        return (-m2 + 16*m1 - 30*f0 + 16*p1 - p2) / (12*h*h)

    return {
        'd_x'  : first(*fx),
        'd_t'  : first(*ft),
        'd_xx' : second(*fx),
        'd_xt' : (4*_cross(f, x, t, h) - _cross(f, x, t, 2*h)) / 3,
        'd_tt' : second(*ft),
    }

def check_jet(
    f        : Callable[[Jet2, Jet2], Jet2],
    points   : np.ndarray,
    channels = 'all',
    h        : float = 1e-3,
    rtol1    : float = 1e-6,
    rtol2    : float = 1e-4,
) -> OracleReport:
    '''
    Compare every requested jet channel of ``f`` with central differences.

    Errors are relative to ``|fd|``, floored at ``1e-12``.

    Parameters:
        f:        jet function of ``(x, t)``
        points:   ``(n, 2)`` array of ``(x, t)`` pairs
        channels: channel request passed to ``jet_eval``
        rtol1:    tolerance for first-order channels
        rtol2:    tolerance for second-order channels
    '''
    channels = close_channels(channels)
    worst    = { name: 0.0 for name in channels }

    for x, t in np.asarray(points, dtype=np.float64):
        jet = jet_eval(f, x, t, channels)
        fd  = fd_partials(f, x, t, h)

        for name in channels:
            exact = float(value_of(getattr(jet, name)))
            err   = abs(exact - fd[name]) / max(abs(fd[name]), REL_FLOOR)
            worst[name] = max(worst[name], err)

    passed = all(
        worst[name] <= (rtol1 if name in _FIRST_ORDER else rtol2)
        for name in worst
    )

    return OracleReport(passed, worst, len(points))

def check_param_gradient(
    loss     : Callable,
    params,
    n_coords : int   = 10,
    seed     : int   = 0,
    h        : float = 1e-4,
    rtol     : float = 1e-5,
) -> OracleReport:
    '''
    Compare ``param_gradient`` against central differences on a random coordinate subset.

    ``loss`` maps a ``ParamVector`` to a scalar (``Var`` when traced, plain value
    otherwise). Differences use the fourth-order five-point stencil and errors are
    relative to ``|fd|``, floored at ``1e-12``.
    '''
    grad   = param_gradient(loss, params)
    rng    = np.random.default_rng(seed)
    coords = rng.choice(params.count, size=min(n_coords, params.count), replace=False)

    def shifted(i, step):
        flat = params.flat.copy()
        flat[i] += step
        return float(value_of(loss(params.with_flat(flat))))

    worst = 0.0
    for i in coords:
        m2, m1, p1, p2 = (shifted(i, k*h) for k in (-2, -1, 1, 2))
        fd = (m2 - 8*m1 + 8*p1 - p2) / (12*h)

        err   = abs(grad[i] - fd) / max(abs(fd), REL_FLOOR)
        worst = max(worst, err)

        logger.debug(f'coord {i}: exact={grad[i]:.6e} fd={fd:.6e} err={err:.2e}')

    return OracleReport(worst <= rtol, { 'grad': worst }, len(coords))
