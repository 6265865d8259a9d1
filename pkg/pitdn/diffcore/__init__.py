'''
Differentiation engine: forward jets for input derivatives up to second order, and a
reverse-mode tape for gradients with respect to network parameters.
'''

from pitdn.diffcore.jet import Jet2, jet_eval, close_channels, CHANNELS
from pitdn.diffcore.tape import GradTape, Var, param_gradient, value_of
from pitdn.diffcore.oracle import check_jet, check_param_gradient, OracleReport

from pitdn.diffcore import ops
