'''
Closed-form fields and small collocation sets shared by the tests.
'''
import numpy as np

from pitdn.diffcore import jet
from pitdn.problems import get_problem
from pitdn.sampling import CollocationCounts, build_collocation


SMALL = CollocationCounts(40, 10, 10)


def advection_rate(x, t):
    '''exact u_t of sin(x - t)'''
    return -jet.cos(x - t)

def kg_acceleration(x, t):
    return get_problem('klein-gordon').exact_dtt(x, t)

def zero_field(x, t):
    return 0.0 * x + 0.0 * t

def nan_field(x, t):
    return x * np.nan

def small_collocation(name: str, seed: int = 0, counts: CollocationCounts = SMALL):
    spec = get_problem(name)
    return spec, build_collocation(spec, counts, seed)
