'''
Benchmark problems, selectable by name.
'''
from pitdn.errors import ConfigError
from pitdn.problems.advection import Advection, advection_spec
from pitdn.problems.burgers import Burgers, burgers_spec
from pitdn.problems.klein_gordon import KleinGordon, klein_gordon_spec


PROBLEMS = {
    'advection'    : advection_spec,
    'burgers'      : burgers_spec,
    'klein-gordon' : klein_gordon_spec,
}

def get_problem(name: str):
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise ConfigError(
            f'Unknown problem "{name}"; expected one of {sorted(PROBLEMS)}'
        ) from None
