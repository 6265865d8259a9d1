'''
Two-stage training: Adam exploration followed by L-BFGS refinement.
'''
import time
import logging

import numpy as np
from colorama import Fore, Back

from pitdn.diffcore.tape import value_of
from pitdn.errors import TrainingAbortedError
from pitdn.optimizer import TrainSchedule, TrainReport
from pitdn.optimizers.adam import Adam
from pitdn.optimizers.lbfgs import LBFGS
from pitdn.util.generic import text_mod, log_report


logger = logging.getLogger(__name__)


def train(
    fn,
    init_params,
    schedule : TrainSchedule,
    progress : bool = True,
    config   : dict | None = None,
) -> TrainReport:
    '''
    Minimize ``fn`` from ``init_params`` with ``schedule``.

    Parameters:
        fn:          ``theta -> (loss, gradient)`` over flat arrays
        init_params: flat array or ``ParamVector``
        schedule:    iteration budgets and optimizer constants
        config:      echo stored on the report

    Raises:
        TrainingAbortedError: a phase failed; ``.phase`` names it and ``.report`` holds
        everything recorded up to the failure.
    '''
    flat  = getattr(init_params, 'flat', init_params)
    theta = np.array(value_of(flat), dtype=np.float64)

    report = TrainReport(final_params=theta, seed=schedule.seed, config=config or {})
    start  = time.perf_counter()

    phases = [
        Adam(schedule.adam_lr, schedule.adam_iters, progress),
        LBFGS(
            max_iters = schedule.lbfgs_max_iters,
            history   = schedule.lbfgs_history,
            c1        = schedule.wolfe_c1,
            c2        = schedule.wolfe_c2,
            grad_tol  = schedule.grad_tol,
            progress  = progress,
        ),
    ]

    for optimizer in phases:
        if optimizer.phase == 'adam' and schedule.adam_iters == 0:
            continue

        logger.info(f'Starting {optimizer.phase} phase')
        try:
            result = optimizer.minimize(fn, theta, start_iteration=len(report.loss_history))
        except Exception as exc:
            report.loss_history.extend(getattr(optimizer, 'trace', []))
            report.wall_clock_seconds = time.perf_counter() - start
            logger.error(text_mod(f'{optimizer.phase} phase aborted: {exc}', Fore.WHITE, Back.RED))
            raise TrainingAbortedError(optimizer.phase, exc, report) from exc

        theta = result.theta
        report.loss_history.extend(result.history)
        report.final_params       = theta
        report.iterations_used   += result.iterations
        report.termination_reason = result.reason
        report.wolfe_violations  += result.wolfe_violations

        if optimizer.phase == 'adam':
            report.adam_iters_used = result.iterations
        else:
            report.lbfgs_iters_used = result.iterations

        logger.info(
            f'{optimizer.phase} phase finished after {result.iterations} iterations '
            f'({result.reason}), loss {result.final_loss}'
        )

    report.wall_clock_seconds = time.perf_counter() - start

    log_report(logger, 'Training report', [
        f'->  Adam iterations   : {report.adam_iters_used}',
        f'->  L-BFGS iterations : {report.lbfgs_iters_used}',
        f'->  Termination       : {report.termination_reason}',
        f'->  Final loss        : {report.final_loss}',
        f'->  Wolfe violations  : {report.wolfe_violations}',
        f'->  Wall clock        : {report.wall_clock_seconds:.2f}s',
    ])

    return report
