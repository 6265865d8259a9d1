'''
Physics-informed time-derivative networks

A network here does not model the solution ``u(x, t)`` of an evolution PDE. It models a
time derivative (``u_t`` for first-order problems, ``u_tt`` for second-order ones) and the
state is recovered by integrating in time from the initial data:

.. code-block:: text

    u(x, t) = u0(x) + int_0^t v(x, s) ds                              (order 1)
    u(x, t) = u0(x) + t v0(x) + int_0^t (t - s) a(x, s) ds            (order 2)

Training drives the time derivative of the PDE residual to zero and pins the residual at
``t = 0`` through a consistency condition, which together make the residual vanish for all
times. The reconstruction is evaluated with the composite trapezoidal rule.

- ``diffcore``: forward jets for input derivatives, a reverse tape for parameter gradients
- ``net``: the tanh MLP over ``(x, t)`` and its checkpoint format
- ``volterra``: the quadrature reconstruction operators
- ``problem`` / ``problems``: PDE descriptions (advection, viscous Burgers, Klein-Gordon)
- ``sampling``: Latin hypercube collocation sets
- ``objective`` / ``objectives``: the differentiated-residual loss and the PINN baseline
- ``optimizer`` / ``optimizers`` / ``trainer``: Adam followed by L-BFGS with a strong Wolfe
  line search
- ``reference``: analytic solutions and a certified finite-difference Burgers solver
- ``harness``: configs, metrics, property checks, experiments and the ``pitdn`` CLI

.. admonition:: Layout

    Modules that define a base class sit next to a subpackage of the same (plural) name
    holding the concrete classes, e.g. ``objective.py`` with ``Objective`` and
    ``objectives/`` with ``PitdnObjective`` and ``PinnObjective``. Package ``__init__``
    files pull classes out of sibling modules and import subpackages whole.
'''

from pitdn.errors    import PitdnError
from pitdn.net       import MlpConfig, ParamVector, init_xavier, forward, network_field
from pitdn.volterra  import QuadratureConfig, QuadratureBatch, reconstruct1, reconstruct2
from pitdn.problem   import ProblemSpec, Domain1D, FieldBundle
from pitdn.sampling  import CollocationCounts, CollocationSet, build_collocation
from pitdn.objective import Objective, LossWeights, LossBreakdown
from pitdn.optimizer import Optimizer, TrainSchedule, TrainReport
from pitdn.trainer   import train
from pitdn.reference import GridSolution, burgers_fd_solve, richardson_verify

from pitdn import util
from pitdn import diffcore
from pitdn import problems
from pitdn import objectives
from pitdn import optimizers
from pitdn import harness
