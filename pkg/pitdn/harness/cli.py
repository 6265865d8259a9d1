'''
Command-line entry point.

.. code-block:: text

    pitdn train --problem <name> --method <pitdn|pinn> [--config <file>] [--seed N] --out <dir>
    pitdn reference burgers --nx N [--nt N] --out <dir>
    pitdn check <quadrature|propagation|wirtinger|gradients|equivalence> [--checkpoint <file>]
    pitdn compare --problem <name> [--config <file>] --out <dir>

Exit status is 0 on success, 1 when a check fails and 2 on an error.
'''
import sys
import json
import logging
import argparse
from pathlib import Path

from pitdn.errors import PitdnError
from pitdn.harness import checks
from pitdn.harness.config import ExperimentConfig, METHODS
from pitdn.harness.experiment import run_experiment, compare, METRICS_FILE
from pitdn.net import load_checkpoint, network_field
from pitdn.problems import PROBLEMS, get_problem
from pitdn.reference import burgers_fd_solve, richardson_verify
from pitdn.volterra import QuadratureConfig


logger = logging.getLogger(__name__)

CHECKS = ('quadrature', 'propagation', 'wirtinger', 'gradients', 'equivalence')


def _experiment_config(args) -> ExperimentConfig:
    overrides = {
        'problem' : args.problem,
        'method'  : getattr(args, 'method', None),
        'seed'    : args.seed,
        'out_dir' : args.out,
    }
    if args.config:
        return ExperimentConfig.from_file(args.config, **overrides)
    return ExperimentConfig.from_dict({ k: v for k, v in overrides.items() if v is not None })

def cmd_train(args) -> int:
    run_experiment(_experiment_config(args), progress=not args.quiet)
    return 0

def cmd_compare(args) -> int:
    compare(_experiment_config(args), progress=not args.quiet)
    return 0

def cmd_reference(args) -> int:
    spec = get_problem('burgers')
    t_end = args.t_end if args.t_end is not None else spec.domain.t_end
    nu    = args.nu if args.nu is not None else spec.nu

    grid = burgers_fd_solve(args.nx, args.nt, nu, t_end, progress=not args.quiet)
    if args.verify:
        report = richardson_verify(
            lambda n: burgers_fd_solve(n, None, nu, t_end), [args.nx, 2*args.nx, 4*args.nx]
        )
        grid.metadata['richardson'] = report.as_dict()

    grid.save(args.out)
    return 0

def load_run(checkpoint: str | Path, problem: str | None = None) -> dict:
    '''
    Checkpoint plus what its run recorded in the neighbouring ``metrics.json``: problem,
    quadrature rule and final loss. ``problem`` overrides the recorded one.
    '''
    checkpoint = Path(checkpoint)
    params, _  = load_checkpoint(checkpoint)

    record  = {}
    metrics = checkpoint.parent / METRICS_FILE
    if metrics.exists():
        record = json.loads(metrics.read_text())
    config = record.get('config', {})

    return {
        'params'     : params,
        'spec'       : get_problem(problem or config.get('problem', 'advection')),
        'q'          : QuadratureConfig(**config.get('quadrature', {})),
        'final_loss' : record.get('final_loss'),
    }

def cmd_check(args) -> int:
    if args.name == 'quadrature':
        results = [checks.check_quadrature(name) for name in checks.INTEGRANDS]
    elif args.name == 'propagation':
        results = [checks.check_propagation(seed=args.seed or 0)]
    elif args.name == 'wirtinger':
        results = [checks.check_wirtinger()]
    elif args.name == 'gradients':
        results = [checks.check_gradients(seed=args.seed or 0)]
    else:
        if args.checkpoint is None:
            raise PitdnError('the equivalence check needs --checkpoint')

        run = load_run(args.checkpoint, args.problem)
        results = [checks.check_equivalence(
            network_field(run['params']), run['spec'], run['q'], final_loss=run['final_loss']
        )]

    for result in results:
        result.log()

    return 0 if all(r.passed is not False for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pitdn',
        description='Time-derivative networks with Volterra reconstruction for evolution PDEs',
    )
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG')
    parser.add_argument('-q', '--quiet', action='store_true', help='hide progress bars')
    sub = parser.add_subparsers(dest='command', required=True)

    def experiment_args(p, with_method):
        p.add_argument('--problem', choices=sorted(PROBLEMS))
        if with_method:
            p.add_argument('--method', choices=METHODS)
        p.add_argument('--config', help='flat TOML config file')
        p.add_argument('--seed', type=int)
        p.add_argument('--out', help='output directory')

    train_p = sub.add_parser('train', help='train one method and score it')
    experiment_args(train_p, with_method=True)
    train_p.set_defaults(handler=cmd_train)

    compare_p = sub.add_parser('compare', help='train both methods on shared collocation')
    experiment_args(compare_p, with_method=False)
    compare_p.set_defaults(handler=cmd_compare)

    ref_p = sub.add_parser('reference', help='finite-difference reference solutions')
    ref_p.add_argument('problem', choices=['burgers'])
    ref_p.add_argument('--nx', type=int, default=512)
    ref_p.add_argument('--nt', type=int, help='time steps (default: smallest stable count)')
    ref_p.add_argument('--nu', type=float)
    ref_p.add_argument('--t-end', dest='t_end', type=float)
    ref_p.add_argument('--verify', action='store_true', help='attach a Richardson report')
    ref_p.add_argument('--out', required=True)
    ref_p.set_defaults(handler=cmd_reference)

    check_p = sub.add_parser('check', help='numerical property checks')
    check_p.add_argument('name', choices=CHECKS)
    check_p.add_argument('--checkpoint', help='trained checkpoint (equivalence)')
    check_p.add_argument('--problem', choices=sorted(PROBLEMS), help='problem of the checkpoint')
    check_p.add_argument('--seed', type=int)
    check_p.set_defaults(handler=cmd_check)

    return parser

def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    level = { 0: logging.WARNING, 1: logging.INFO }.get(args.verbose, logging.DEBUG)
    if args.command == 'check':
        level = min(level, logging.INFO)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')

    try:
        return args.handler(args)
    except PitdnError as exc:
        logger.error(f'{type(exc).__name__}: {exc}')
        return 2


if __name__ == '__main__':
    sys.exit(main())
