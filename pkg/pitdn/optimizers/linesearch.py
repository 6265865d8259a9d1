'''
Strong Wolfe line search.

Bracketing phase followed by a zoom phase, in the usual quasi-Newton form: the step grows
until it either brackets an acceptable point or satisfies both conditions outright, then
the bracket is narrowed by safeguarded cubic interpolation. A step is accepted only when

.. code-block:: text

    phi(a)       <= phi(0) + c1 a phi'(0)        (sufficient decrease)
    |phi'(a)|    <= c2 |phi'(0)|                 (curvature)

Trial points where the objective is not finite are treated as failing sufficient
decrease, which shrinks the interval; the next trial is then a bisection.
'''
import math
import logging
from dataclasses import dataclass
from collections.abc import Callable

import numpy as np


logger = logging.getLogger(__name__)

MAX_BRACKET = 25
MAX_ZOOM    = 40
ALPHA_MAX   = 1e10


@dataclass
class LineSearchResult:
    alpha       : float
    value       : float
    slope       : float
    payload     : object
    evaluations : int


def cubic_minimizer(a, fa, da, b, fb, db) -> float:
    '''
    Minimizer of the cubic interpolating values and slopes at ``a`` and ``b``; ``nan``
    when it does not exist.
    '''
    if a == b:
        return math.nan

    d1  = da + db - 3 * (fa - fb) / (a - b)
    rad = d1 * d1 - da * db
    if not np.isfinite(rad) or rad < 0:
        return math.nan

    d2    = math.copysign(math.sqrt(rad), b - a)
    denom = db - da + 2 * d2
    if denom == 0 or not np.isfinite(denom):
        return math.nan

    return b - (b - a) * (db + d2 - d1) / denom

def _is_finite(*values) -> bool:
    return all(np.isfinite(v) for v in values)

def strong_wolfe(
    phi     : Callable[[float], tuple[float, float, object]],
    f0      : float,
    d0      : float,
    alpha1  : float = 1.0,
    c1      : float = 1e-4,
    c2      : float = 0.9,
) -> LineSearchResult | None:
    '''
    Search along a descent direction.

    Parameters:
        phi:    ``alpha -> (value, slope, payload)``; ``payload`` is handed back untouched
                with the accepted step (the optimizer stores the full gradient there)
        f0, d0: value and (negative) slope at ``alpha = 0``
        alpha1: first trial step

    Returns:
        The accepted step, or ``None`` when no strong Wolfe point was found.
    '''
    evals = 0

    def zoom(lo, f_lo, d_lo, hi, f_hi, d_hi):
        nonlocal evals

        for _ in range(MAX_ZOOM):
            width = hi - lo
            if abs(width) <= 1e-16 * max(1.0, abs(lo)):
                break

            alpha = math.nan
            if _is_finite(f_hi, d_hi):
                alpha = cubic_minimizer(lo, f_lo, d_lo, hi, f_hi, d_hi)

            # keep trials away from the bracket ends
            left, right = min(lo, hi), max(lo, hi)
            margin = 0.1 * (right - left)
            if not np.isfinite(alpha) or not (left + margin <= alpha <= right - margin):
                alpha = lo + 0.5 * width

            f, d, payload = phi(alpha)
            evals += 1

            if not _is_finite(f, d) or f > f0 + c1 * alpha * d0 or f >= f_lo:
                hi, f_hi, d_hi = alpha, f, d
                continue

            if abs(d) <= -c2 * d0:
                return LineSearchResult(alpha, f, d, payload, evals)

            if d * (hi - lo) >= 0:
                hi, f_hi, d_hi = lo, f_lo, d_lo
            lo, f_lo, d_lo = alpha, f, d

        logger.debug(f'Line search zoom exhausted after {evals} evaluations')
        return None

    alpha_prev, f_prev, d_prev = 0.0, f0, d0
    alpha = alpha1

    for i in range(MAX_BRACKET):
        f, d, payload = phi(alpha)
        evals += 1

        if not _is_finite(f, d) or f > f0 + c1 * alpha * d0 or (i > 0 and f >= f_prev):
            return zoom(alpha_prev, f_prev, d_prev, alpha, f, d)

        if abs(d) <= -c2 * d0:
            return LineSearchResult(alpha, f, d, payload, evals)

        if d >= 0:
            return zoom(alpha, f, d, alpha_prev, f_prev, d_prev)

        alpha_prev, f_prev, d_prev = alpha, f, d
        alpha = min(2.0 * alpha, ALPHA_MAX)

    logger.debug(f'Line search bracketing exhausted after {evals} evaluations')
    return None
