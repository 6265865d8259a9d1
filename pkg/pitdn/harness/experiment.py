'''
Experiment orchestration.

``run_experiment`` trains one method on one problem and scores it. Its output directory
looks like this:

.. code-block:: text

    <out_dir>/
        collocation.csv     x,t,kind rows of the training points
        checkpoint.bin      final network parameters
        loss_history.csv    iter,phase,total,pde,bc,ic
        solution_grid.csv   x,t,u_pred,u_ref,abs_err on the evaluation grid
        slices.csv          t_slice,x,u_pred,u_ref at t in {0, T/4, T/2, 3T/4, T}
        metrics.json        validated ``MetricsReport``
        error.json          only when training aborted

``compare`` runs both methods on one shared collocation set, writing each run to a
sub-directory named after the method plus a ``comparison.csv`` table at the top level.

References are analytic where the problem has a closed form. For viscous Burgers the
finite-difference solution at ``reference_nx`` intervals is certified by Richardson
verification on ``reference_nx``, ``2 reference_nx`` and ``4 reference_nx`` intervals
before any training starts. A reference that fails raises ``CertificationError``.
'''
import logging
from pathlib import Path
from dataclasses import dataclass, field, replace

import numpy as np
from colorama import Fore, Back

from pitdn.diffcore.jet import jet_eval
from pitdn.diffcore.tape import value_of
from pitdn.errors import CertificationError, TrainingAbortedError
from pitdn.harness import io
from pitdn.harness.config import ExperimentConfig, METHODS
from pitdn.harness.metrics import MetricsReport, rel_l2, rel_linf, validate_metrics
from pitdn.net import ParamVector, init_xavier, save_checkpoint
from pitdn.objectives import OBJECTIVES
from pitdn.problem import ProblemSpec
from pitdn.problems import get_problem
from pitdn.reference import GridSolution, burgers_fd_solve, richardson_verify
from pitdn.sampling import CollocationSet, build_collocation
from pitdn.trainer import train
from pitdn.util.generic import text_mod, log_report


logger = logging.getLogger(__name__)

SLICE_FRACTIONS = (0.0, 0.25, 0.5, 0.75, 1.0)

COLLOCATION_FILE = 'collocation.csv'
CHECKPOINT_FILE  = 'checkpoint.bin'
HISTORY_FILE     = 'loss_history.csv'
GRID_FILE        = 'solution_grid.csv'
SLICES_FILE      = 'slices.csv'
METRICS_FILE     = 'metrics.json'
ERROR_FILE       = 'error.json'
COMPARISON_FILE  = 'comparison.csv'


@dataclass
class Reference:
    '''
    Ground truth for scoring.

    Attributes:
        kind:    ``analytic`` or ``fd-certified``
        state:   ``(x, t) -> u`` on flat point arrays
        rate:    ``(x, t) -> u_t`` (order 1) or ``u_tt`` (order 2), when known
        details: provenance, e.g. the Richardson report
    '''
    kind    : str
    state   : object
    rate    : object = None
    details : dict = field(default_factory=dict)


def _analytic(fn):
    def evaluate(x, t):
        x = np.asarray(x, dtype=np.float64)
        out = jet_eval(fn, x, np.asarray(t, dtype=np.float64), ())
        return np.broadcast_to(value_of(out.value), x.shape).copy()

    return evaluate

def build_reference(spec: ProblemSpec, config: ExperimentConfig, progress: bool = False) -> Reference:
    if spec.has_exact:
        rate = spec.exact_dt if spec.order == 1 else spec.exact_dtt
        return Reference('analytic', _analytic(spec.exact), _analytic(rate))

    nx = config.reference_nx
    t_end = spec.domain.t_end

    def solver(n):
        return burgers_fd_solve(n, nu=spec.nu, t_end=t_end, progress=progress)

    report = richardson_verify(solver, [nx, 2*nx, 4*nx])
    if not report.certified:
        raise CertificationError(
            f'finite-difference reference at nx={nx} is not certified '
            f'(orders {report.orders}, flags {report.flags})',
            report,
        )

    grid: GridSolution = report.solutions[0]
    return Reference('fd-certified', grid.sample, None, { 'richardson': report.as_dict(), **grid.metadata })


def evaluation_grid(spec: ProblemSpec, config: ExperimentConfig) -> tuple[np.ndarray, np.ndarray]:
    d = spec.domain
    return (
        np.linspace(d.x_lo, d.x_hi, config.eval_nx),
        np.linspace(0.0, d.t_end, config.eval_nt),
    )

def _slice_label(t: float) -> str:
    return f't={t:g}'

def evaluate(objective, params: ParamVector, reference: Reference, config: ExperimentConfig) -> dict:
    '''
    Predict on the evaluation grid and at the slice times, and score against ``reference``.
    '''
    spec = objective.spec
    x, t = evaluation_grid(spec, config)
    X, T = np.meshgrid(x, t)

    u_pred = objective.predict(params, X.ravel(), T.ravel()).reshape(X.shape)
    u_ref  = reference.state(X.ravel(), T.ravel()).reshape(X.shape)

    rate_error = None
    if reference.rate is not None:
        rate_pred  = objective.predict_rate(params, X.ravel(), T.ravel())
        rate_error = rel_l2(rate_pred, reference.rate(X.ravel(), T.ravel()))

    slices, slice_errors = {}, {}
    for fraction in SLICE_FRACTIONS:
        ts = fraction * spec.domain.t_end
        tt = np.full_like(x, ts)
        pred, ref = objective.predict(params, x, tt), reference.state(x, tt)
        slices[ts] = (pred, ref)

        if np.linalg.norm(ref) > 0:
            slice_errors[_slice_label(ts)] = rel_l2(pred, ref)
        else:
            logger.warning(f'Skipping slice t={ts:g}: reference is identically zero')

    return {
        'x'           : x,
        't'           : t,
        'u_pred'      : u_pred,
        'u_ref'       : u_ref,
        'rel_l2'      : rel_l2(u_pred, u_ref),
        'rel_linf'    : rel_linf(u_pred, u_ref),
        'rel_l2_rate' : rate_error,
        'slices'      : slices,
        'slice_errors': slice_errors,
    }


def _write_abort(out: Path, exc: TrainingAbortedError, layer_sizes, seed: int):
    partial = exc.report
    if partial is not None:
        io.write_history(out / HISTORY_FILE, partial.loss_history)
        if partial.final_params is not None:
            save_checkpoint(out / CHECKPOINT_FILE, ParamVector(partial.final_params, layer_sizes), seed)

    io.write_json(out / ERROR_FILE, {
        'phase'      : exc.phase,
        'error'      : type(exc.cause).__name__,
        'message'    : str(exc.cause),
        'iterations' : partial.iterations_used if partial is not None else 0,
        'final_loss' : partial.final_loss if partial is not None else None,
    })
    logger.error(text_mod(f'Training aborted; partial artifacts written to "{out}"', Fore.WHITE, Back.RED))

def run_experiment(
    config      : ExperimentConfig,
    progress    : bool = True,
    collocation : CollocationSet | None = None,
    reference   : Reference | None = None,
) -> MetricsReport:
    '''
    Train ``config.method`` on ``config.problem``, score it and write the run artifacts
    to ``config.out_dir``.

    Parameters:
        collocation: shared training points; built from ``config.seed`` when omitted
        reference:   precomputed ground truth; built from the problem when omitted

    Raises:
        CertificationError: before training, when the Burgers reference is not certified.
        TrainingAbortedError: after ``error.json`` and the partial artifacts are written.
    '''
    spec = get_problem(config.problem)
    out  = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    logger.info(f'Running {config.method} on "{spec.name}" (seed {config.seed}) into "{out}"')

    reference = reference or build_reference(spec, config, progress)

    colloc = collocation or build_collocation(spec, config.counts, config.seed)
    colloc.to_csv(out / COLLOCATION_FILE)

    objective   = OBJECTIVES[config.method](spec, colloc, config.weights, config.quadrature)
    layer_sizes = config.mlp.layer_sizes
    params0     = init_xavier(config.mlp)

    try:
        report = train(objective.closure(layer_sizes), params0, config.schedule, progress, config.to_dict())
    except TrainingAbortedError as exc:
        _write_abort(out, exc, layer_sizes, config.seed)
        raise

    params = ParamVector(report.final_params, layer_sizes)
    save_checkpoint(out / CHECKPOINT_FILE, params, config.seed)
    io.write_history(out / HISTORY_FILE, report.loss_history)

    scores = evaluate(objective, params, reference, config)

    io.write_grid(out / GRID_FILE, scores['x'], scores['t'], scores['u_pred'], scores['u_ref'])
    io.write_slices(out / SLICES_FILE, scores['x'], scores['slices'])

    metrics = MetricsReport(
        problem            = spec.name,
        method             = config.method,
        rel_l2             = scores['rel_l2'],
        rel_linf           = scores['rel_linf'],
        rel_l2_rate        = scores['rel_l2_rate'],
        slices             = scores['slice_errors'],
        wall_clock_seconds = report.wall_clock_seconds,
        final_loss         = report.final_loss,
        iterations         = report.iterations_used,
        termination_reason = report.termination_reason,
        reference          = reference.kind,
        seed               = config.seed,
        config             = config.to_dict(),
    )
    record = metrics.to_dict()
    validate_metrics(record)
    io.write_json(out / METRICS_FILE, record)

    rate_line = '' if metrics.rel_l2_rate is None else f'{metrics.rel_l2_rate:.3e}'
    log_report(logger, f'Experiment: {config.method} / {spec.name}', [
        f'->  Relative L2      : {metrics.rel_l2:.3e}',
        f'->  Relative Linf    : {metrics.rel_linf:.3e}',
        f'->  Rate rel. L2     : {rate_line or "n/a"}',
        f'->  Reference        : {metrics.reference}',
        f'->  Final loss       : {metrics.final_loss}',
        f'->  Iterations       : {metrics.iterations} ({metrics.termination_reason})',
        f'->  Wall clock       : {metrics.wall_clock_seconds:.2f}s',
    ])

    return metrics


def compare(config: ExperimentConfig, progress: bool = True) -> dict[str, MetricsReport]:
    '''
    Run every method on one collocation set and one reference; write ``comparison.csv``.
    '''
    spec = get_problem(config.problem)
    root = Path(config.out_dir)

    colloc    = build_collocation(spec, config.counts, config.seed)
    reference = build_reference(spec, config, progress)

    results = {}
    for method in METHODS:
        run_config = replace(config, method=method, out_dir=str(root / method))
        results[method] = run_experiment(run_config, progress, colloc, reference)

    io.write_rows(root / COMPARISON_FILE, io.COMPARISON_COLUMNS, (
        {
            'method'     : method,
            'rel_l2'     : m.rel_l2,
            'rel_linf'   : m.rel_linf,
            'wall_clock' : m.wall_clock_seconds,
        }
        for method, m in results.items()
    ))

    pitdn, pinn = results['pitdn'].rel_l2, results['pinn'].rel_l2
    ratio = pinn / pitdn if pitdn > 0 else float('inf')
    log_report(logger, f'Comparison on "{spec.name}"', [
        f'->  {method:<6} rel. L2 : {m.rel_l2:.3e}' for method, m in results.items()
    ] + [f'->  PINN / PITDN   : {ratio:.2f}x'])

    return results
