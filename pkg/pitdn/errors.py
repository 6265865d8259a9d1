'''
Exception hierarchy for the solver.

Everything raised on purpose by the package derives from ``PitdnError`` so callers (the
CLI in particular) can separate solver failures from genuine bugs. Configuration problems
additionally derive from ``ValueError``, matching how config dataclasses validate in
``__post_init__``.

.. admonition:: On line-search failure

    L-BFGS line-search failure has no exception class. The optimizer reports it through
    ``TrainReport.termination_reason`` and keeps the best point found.
'''


class PitdnError(Exception):
    pass


class ConfigError(PitdnError, ValueError):
    pass


class JetEvaluationError(PitdnError, ArithmeticError):
    '''
    Raised when a primitive inside a jet computation leaves its domain (division by zero,
    fractional power of a negative number, ...). ``primitive`` names the offending
    operation.
    '''
    def __init__(self, primitive: str, detail: str = ''):
        self.primitive = primitive
        self.detail    = detail

        msg = f'jet primitive "{primitive}" failed'
        if detail:
            msg += f': {detail}'

        super().__init__(msg)


class MissingChannelError(PitdnError, KeyError):
    '''
    A derivative channel was read from a jet that was never asked to carry it.
    '''
    def __init__(self, channel: str, available=()):
        self.channel   = channel
        self.available = tuple(sorted(available))

        super().__init__(
            f'jet does not carry channel "{channel}" (available: {self.available})'
        )

    def __str__(self):
        return self.args[0]


class ShapeMismatchError(PitdnError, ValueError):
    pass


class QuadratureDomainError(PitdnError, ValueError):
    pass


class NonFiniteLossError(PitdnError, FloatingPointError):
    '''
    Carries the parameter state (flat array) and, when it could be located, the
    collocation point responsible for the non-finite value.
    '''
    def __init__(self, message: str, params=None, point=None):
        self.params = params
        self.point  = point

        if point is not None:
            message = f'{message} (at point {point})'

        super().__init__(message)


class StabilityError(PitdnError, ValueError):
    def __init__(self, message: str, nt_min: int):
        self.nt_min = nt_min
        super().__init__(f'{message}; use nt >= {nt_min}')


class MissingExactSolutionError(PitdnError, LookupError):
    pass


class CertificationError(PitdnError, RuntimeError):
    '''
    A numerical reference failed Richardson verification. ``report`` is the failing
    ``RichardsonReport``.
    '''
    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class TrainingAbortedError(PitdnError, RuntimeError):
    '''
    Raised by the trainer when a phase fails. ``phase`` is ``"adam"`` or ``"lbfgs"``;
    ``report`` holds the partial ``TrainReport`` accumulated so far.
    '''
    def __init__(self, phase: str, cause: Exception, report=None):
        self.phase  = phase
        self.cause  = cause
        self.report = report

        super().__init__(f'[{phase}] training aborted: {cause}')
