def test_import():
    from pitdn import diffcore
    from pitdn import MlpConfig
    from pitdn import ParamVector
    from pitdn import QuadratureConfig
    from pitdn import ProblemSpec
    from pitdn import CollocationSet
    from pitdn import Objective
    from pitdn import Optimizer
    from pitdn import GridSolution
    from pitdn import train

    from pitdn.diffcore import Jet2
    from pitdn.diffcore import GradTape
    from pitdn.diffcore import jet_eval

    from pitdn.problems import Advection
    from pitdn.problems import Burgers
    from pitdn.problems import KleinGordon

    from pitdn.objectives import PitdnObjective
    from pitdn.objectives import PinnObjective

    from pitdn.optimizers import Adam
    from pitdn.optimizers import LBFGS

    from pitdn.harness import ExperimentConfig
    from pitdn.harness import run_experiment
    from pitdn.harness.cli import main

    assert True
