import logging
from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from pitdn.errors import NonFiniteLossError
from pitdn.optimizer import Optimizer, PhaseResult, HistoryEntry, loss_total


logger = logging.getLogger(__name__)

BETA1 = 0.9
BETA2 = 0.999
EPS   = 1e-8


@dataclass
class AdamState:
    m : np.ndarray
    v : np.ndarray

    @classmethod
    def zeros(cls, n: int) -> 'AdamState':
        return cls(np.zeros(n), np.zeros(n))


def adam_step(
    state     : AdamState,
    params    : np.ndarray,
    gradient  : np.ndarray,
    lr        : float,
    iteration : int,
) -> tuple[AdamState, np.ndarray]:
    '''
    One bias-corrected Adam update.

    Parameters:
        iteration: 1-based step count used for bias correction

    Returns:
        ``(new_state, new_params)``; inputs are not modified.
    '''
    gradient = np.asarray(gradient, dtype=np.float64)
    if gradient.shape != params.shape or state.m.shape != params.shape:
        raise ValueError(
            f'Adam shapes differ: params {params.shape}, gradient {gradient.shape}, '
            f'state {state.m.shape}'
        )
    if not np.all(np.isfinite(gradient)):
        bad = np.flatnonzero(~np.isfinite(gradient))
        raise NonFiniteLossError(
            f'non-finite gradient at step {iteration} (first bad coordinate {bad[0]})',
            params=params.copy(),
        )

    m = BETA1 * state.m + (1 - BETA1) * gradient
    v = BETA2 * state.v + (1 - BETA2) * gradient * gradient

    m_hat = m / (1 - BETA1**iteration)
    v_hat = v / (1 - BETA2**iteration)

    return AdamState(m, v), params - lr * m_hat / (np.sqrt(v_hat) + EPS)


class Adam(Optimizer):
    phase = 'adam'

    def __init__(self, lr: float = 1e-3, iterations: int = 3000, progress: bool = True):
        self.lr         = lr
        self.iterations = iterations
        self.progress   = progress

    def minimize(self, fn, theta0, start_iteration=0) -> PhaseResult:
        theta   = np.array(theta0, dtype=np.float64)
        state   = AdamState.zeros(theta.size)
        history = self.trace = []

        pbar = tqdm(range(1, self.iterations + 1), desc='Adam', disable=not self.progress)
        for step in pbar:
            loss, grad = fn(theta)
            total = loss_total(loss)
            if not np.isfinite(total):
                raise NonFiniteLossError(f'loss evaluated to {total}', params=theta.copy())

            history.append(HistoryEntry(start_iteration + step - 1, self.phase, loss))
            state, theta = adam_step(state, theta, grad, self.lr, step)

            pbar.set_postfix(loss=f'{total:.3e}', refresh=False)

        logger.debug(f'Adam finished {self.iterations} steps')

        return PhaseResult(theta, history, self.iterations, 'iteration cap')
