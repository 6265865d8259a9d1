'''
Optimizer base and training records.

Optimizers minimize a ``ValueAndGrad`` closure ``theta -> (loss, gradient)`` over a flat
parameter array. The loss may be a bare float or a ``LossBreakdown``; only its total drives
the optimization, the rest is kept in the history. Concrete optimizers live in
``pitdn.optimizers`` and the two-stage schedule that chains them in ``pitdn.trainer``.
'''
import logging
from dataclasses import dataclass, field
from abc import ABCMeta, abstractmethod

import numpy as np

from pitdn.errors import ConfigError
from pitdn.util.types import ValueAndGrad


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainSchedule:
    adam_iters      : int   = 3000
    adam_lr         : float = 1e-3
    lbfgs_max_iters : int   = 5000
    lbfgs_history   : int   = 20
    wolfe_c1        : float = 1e-4
    wolfe_c2        : float = 0.9
    grad_tol        : float = 1e-9
    seed            : int   = 0

    def __post_init__(self):
        if self.adam_iters < 0 or self.lbfgs_max_iters < 0:
            raise ConfigError('iteration counts must be >= 0')
        if not self.adam_lr > 0:
            raise ConfigError(f'adam_lr must be > 0, got {self.adam_lr}')
        if self.lbfgs_history < 1:
            raise ConfigError(f'lbfgs_history must be >= 1, got {self.lbfgs_history}')
        if not 0 < self.wolfe_c1 < self.wolfe_c2 < 1:
            raise ConfigError(
                f'Wolfe constants need 0 < c1 < c2 < 1, got c1={self.wolfe_c1}, c2={self.wolfe_c2}'
            )
        if not self.grad_tol > 0:
            raise ConfigError(f'grad_tol must be > 0, got {self.grad_tol}')


@dataclass(frozen=True)
class HistoryEntry:
    iteration : int
    phase     : str
    loss      : object

    @property
    def total(self) -> float:
        return loss_total(self.loss)

    def row(self) -> dict:
        '''
        Flat ``iter,phase,total,pde,bc,ic`` record; parts are empty for bare-float losses.
        '''
        parts = self.loss.as_dict() if hasattr(self.loss, 'as_dict') else { 'total': self.total }
        return {
            'iter'  : self.iteration,
            'phase' : self.phase,
            'total' : parts['total'],
            'pde'   : parts.get('pde', ''),
            'bc'    : parts.get('bc', ''),
            'ic'    : parts.get('ic', ''),
        }


@dataclass
class PhaseResult:
    theta            : np.ndarray
    history          : list[HistoryEntry]
    iterations       : int
    reason           : str
    wolfe_violations : int = 0

    @property
    def final_loss(self) -> float | None:
        return self.history[-1].total if self.history else None


@dataclass
class TrainReport:
    '''
    Outcome of a training run.

    ``loss_history`` holds one entry per optimizer iteration across both phases;
    ``termination_reason`` is the L-BFGS phase's reason (or the Adam phase's when L-BFGS
    did not run).
    '''
    loss_history       : list[HistoryEntry] = field(default_factory=list)
    final_params       : np.ndarray | None = None
    iterations_used    : int   = 0
    termination_reason : str   = ''
    wall_clock_seconds : float = 0.0
    seed               : int   = 0
    adam_iters_used    : int   = 0
    lbfgs_iters_used   : int   = 0
    wolfe_violations   : int   = 0
    config             : dict  = field(default_factory=dict)

    @property
    def final_loss(self) -> float | None:
        return self.loss_history[-1].total if self.loss_history else None

    def phase_history(self, phase: str) -> list[HistoryEntry]:
        return [entry for entry in self.loss_history if entry.phase == phase]


def loss_total(loss) -> float:
    return float(loss.total) if hasattr(loss, 'total') else float(loss)


class Optimizer(metaclass=ABCMeta):
    '''
    Minimizer over flat parameter arrays.

    ``start_iteration`` offsets the iteration numbers written to the history so phases
    chained by the trainer produce one continuous series.
    '''
    phase: str

    @abstractmethod
    def minimize(
        self,
        fn              : ValueAndGrad,
        theta0          : np.ndarray,
        start_iteration : int = 0,
    ) -> PhaseResult:
        raise NotImplementedError
