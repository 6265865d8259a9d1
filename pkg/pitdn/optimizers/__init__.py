from pitdn.optimizers.adam import Adam, AdamState, adam_step
from pitdn.optimizers.lbfgs import LBFGS, lbfgs_minimize
from pitdn.optimizers.linesearch import strong_wolfe, LineSearchResult
