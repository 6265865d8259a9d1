'''
Experiment harness: configuration, metrics, property checks, runs and the CLI.
'''

from pitdn.harness.config import ExperimentConfig
from pitdn.harness.metrics import MetricsReport, rel_l2, rel_linf, validate_metrics
from pitdn.harness.checks import (
    CheckResult,
    check_quadrature,
    check_propagation,
    check_wirtinger,
    check_gradients,
    check_equivalence,
)
from pitdn.harness.experiment import run_experiment, compare, build_reference
