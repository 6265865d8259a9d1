import logging
from collections import deque

import numpy as np
from tqdm import tqdm

from pitdn.errors import NonFiniteLossError
from pitdn.optimizer import Optimizer, PhaseResult, HistoryEntry, loss_total
from pitdn.optimizers.linesearch import strong_wolfe


logger = logging.getLogger(__name__)

REASON_GRAD = 'gradient tolerance'
REASON_CAP  = 'iteration cap'
REASON_LS   = 'line search failure'


def two_loop(grad: np.ndarray, s_hist, y_hist) -> np.ndarray:
    '''
    Apply the limited-memory inverse Hessian approximation to ``grad``.

    The initial matrix is ``gamma I`` with ``gamma = s'y / y'y`` from the newest pair.
    '''
    q = grad.copy()
    alphas = []
    rhos   = [1.0 / (y @ s) for s, y in zip(s_hist, y_hist)]

    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rhos)):
        a = rho * (s @ q)
        q -= a * y
        alphas.append(a)

    if s_hist:
        s, y  = s_hist[-1], y_hist[-1]
        q    *= (s @ y) / (y @ y)

    for (s, y, rho), a in zip(zip(s_hist, y_hist, rhos), reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s

    return q


class LBFGS(Optimizer):
    '''
    Limited-memory BFGS with a strong Wolfe line search.

    The first step (and any step after a memory reset) tries ``min(1, 1/||g||_1)``, later
    steps try the unit step. Line-search failure ends the phase with the best point so
    far and reason ``"line search failure"``; it is not an error.
    '''
    phase = 'lbfgs'

    def __init__(
        self,
        max_iters : int   = 5000,
        history   : int   = 20,
        c1        : float = 1e-4,
        c2        : float = 0.9,
        grad_tol  : float = 1e-9,
        progress  : bool  = True,
    ):
        self.max_iters = max_iters
        self.history   = history
        self.c1        = c1
        self.c2        = c2
        self.grad_tol  = grad_tol
        self.progress  = progress

    def minimize(self, fn, theta0, start_iteration=0) -> PhaseResult:
        theta = np.array(theta0, dtype=np.float64)

        loss, grad = fn(theta)
        f = loss_total(loss)
        grad = np.asarray(grad, dtype=np.float64)
        if not np.isfinite(f) or not np.all(np.isfinite(grad)):
            raise NonFiniteLossError(f'L-BFGS start point has loss {f}', params=theta.copy())

        s_hist = deque(maxlen=self.history)
        y_hist = deque(maxlen=self.history)

        history    = self.trace = []
        violations = 0
        reason     = REASON_CAP
        iterations = 0

        def phi(direction):
            def evaluate(alpha):
                trial = theta + alpha * direction
                try:
                    trial_loss, trial_grad = fn(trial)
                except NonFiniteLossError:
                    logger.debug(f'Non-finite loss at alpha={alpha:.3e}, shrinking')
                    return np.inf, np.nan, None

                trial_grad = np.asarray(trial_grad, dtype=np.float64)
                value = loss_total(trial_loss)
                return value, float(trial_grad @ direction), (trial_loss, trial_grad)

            return evaluate

        pbar = tqdm(total=self.max_iters, desc='L-BFGS', disable=not self.progress)
        with pbar as _:
            while True:
                if np.max(np.abs(grad), initial=0.0) <= self.grad_tol:
                    reason = REASON_GRAD
                    break
                if iterations >= self.max_iters:
                    reason = REASON_CAP
                    break

                direction = -two_loop(grad, s_hist, y_hist)
                slope = float(grad @ direction)
                if not slope < 0:
                    logger.debug(f'Non-descent direction at iteration {iterations}, resetting memory')
                    s_hist.clear()
                    y_hist.clear()
                    direction = -grad
                    slope = float(grad @ direction)

                alpha1 = 1.0
                if not s_hist:
                    alpha1 = min(1.0, 1.0 / np.sum(np.abs(grad)))

                result = strong_wolfe(phi(direction), f, slope, alpha1, self.c1, self.c2)
                if result is None:
                    reason = REASON_LS
                    break

                new_loss, new_grad = result.payload
                f_new = result.value

                if not (
                    f_new <= f + self.c1 * result.alpha * slope
                    and abs(result.slope) <= self.c2 * abs(slope)
                ):
                    violations += 1
                    logger.warning(f'Accepted step {iterations} violates the strong Wolfe conditions')

                step = result.alpha * direction
                y    = new_grad - grad
                if (sy := float(step @ y)) > 1e-12 * float(np.sqrt((step @ step) * (y @ y))):
                    s_hist.append(step)
                    y_hist.append(y)
                else:
                    logger.debug(f'Skipping curvature pair with s\'y = {sy:.3e}')

                theta = theta + step
                f, grad = f_new, new_grad

                history.append(HistoryEntry(start_iteration + iterations, self.phase, new_loss))
                iterations += 1

                pbar.update(1)
                pbar.set_postfix(loss=f'{f:.3e}', refresh=False)

        logger.debug(f'L-BFGS stopped after {iterations} iterations: {reason}')

        return PhaseResult(theta, history, iterations, reason, violations)


def lbfgs_minimize(fn, params, schedule, progress: bool = False) -> PhaseResult:
    '''
    Run the L-BFGS phase of ``schedule`` on ``fn`` from ``params`` (a flat array).
    '''
    optimizer = LBFGS(
        max_iters = schedule.lbfgs_max_iters,
        history   = schedule.lbfgs_history,
        c1        = schedule.wolfe_c1,
        c2        = schedule.wolfe_c2,
        grad_tol  = schedule.grad_tol,
        progress  = progress,
    )
    return optimizer.minimize(fn, params)
