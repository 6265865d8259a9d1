from pitdn.objectives.pitdn import PitdnObjective, pitdn_loss
from pitdn.objectives.pinn import PinnObjective, pinn_baseline_loss


OBJECTIVES = {
    'pitdn' : PitdnObjective,
    'pinn'  : PinnObjective,
}
