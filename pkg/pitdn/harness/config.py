'''
Experiment configuration.

``ExperimentConfig`` nests the per-module configs, each a frozen dataclass whose defaults
are the standard benchmark hyperparameters (``[2, 10, 10, 10, 1]`` tanh network, 3000 Adam
steps at ``1e-3`` then up to 5000 L-BFGS steps, weights ``1/1/10``, ``M = 10`` quadrature
nodes per unit time, ``5000/500/500`` collocation points).

Config files are flat TOML. Every key maps to exactly one nested field:

.. code-block:: toml

    problem    = "burgers"
    method     = "pitdn"
    adam_iters = 1000
    lambda_icp = 10.0
    n_interior = 2000

Unknown keys raise ``ConfigError``; missing keys keep their defaults.
'''
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import logging
from pathlib import Path
from dataclasses import dataclass, field, fields, replace

from pitdn.errors import ConfigError
from pitdn.net import MlpConfig
from pitdn.objective import LossWeights
from pitdn.optimizer import TrainSchedule
from pitdn.problems import PROBLEMS
from pitdn.sampling import CollocationCounts
from pitdn.util.types import to_jsonable
from pitdn.volterra import QuadratureConfig


logger = logging.getLogger(__name__)

METHODS = ('pitdn', 'pinn')

SECTIONS = {
    'mlp'        : MlpConfig,
    'schedule'   : TrainSchedule,
    'weights'    : LossWeights,
    'quadrature' : QuadratureConfig,
    'counts'     : CollocationCounts,
}

# flat key -> nested section; the seed is handled at the top level
FLAT_KEYS = {
    f.name: section
    for section, cls in SECTIONS.items()
    for f in fields(cls)
    if f.name != 'seed'
}


@dataclass(frozen=True)
class ExperimentConfig:
    problem      : str = 'advection'
    method       : str = 'pitdn'
    mlp          : MlpConfig         = field(default_factory=MlpConfig)
    schedule     : TrainSchedule     = field(default_factory=TrainSchedule)
    weights      : LossWeights       = field(default_factory=LossWeights)
    quadrature   : QuadratureConfig  = field(default_factory=QuadratureConfig)
    counts       : CollocationCounts = field(default_factory=CollocationCounts)
    eval_nx      : int = 256
    eval_nt      : int = 101
    reference_nx : int = 512
    out_dir      : str = 'runs'
    seed         : int = 0

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigError(f'Unknown problem "{self.problem}"; expected one of {sorted(PROBLEMS)}')
        if self.method not in METHODS:
            raise ConfigError(f'Unknown method "{self.method}"; expected one of {METHODS}')
        if self.eval_nx < 2 or self.eval_nt < 2:
            raise ConfigError(f'evaluation grid must be at least 2x2, got {self.eval_nx}x{self.eval_nt}')
        if self.reference_nx < 2 or self.reference_nx % 2:
            raise ConfigError(f'reference_nx must be an even integer >= 2, got {self.reference_nx}')

        # one seed drives initialization, sampling and the schedule record
        object.__setattr__(self, 'mlp', replace(self.mlp, seed=self.seed))
        object.__setattr__(self, 'schedule', replace(self.schedule, seed=self.seed))

    @classmethod
    def from_dict(cls, values: dict) -> 'ExperimentConfig':
        top      = {}
        sections = { name: {} for name in SECTIONS }
        top_keys = { f.name for f in fields(cls) } - set(SECTIONS)

        for key, value in values.items():
            if key in top_keys:
                top[key] = value
            elif key in FLAT_KEYS:
                if key == 'layer_sizes':
                    value = tuple(value)
                sections[FLAT_KEYS[key]][key] = value
            else:
                raise ConfigError(f'Unknown config key "{key}"')

        try:
            nested = { name: SECTIONS[name](**kw) for name, kw in sections.items() }
            return cls(**top, **nested)
        except TypeError as exc:
            raise ConfigError(f'Invalid config value: {exc}') from exc

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> 'ExperimentConfig':
        '''
        Load a flat TOML config; ``overrides`` (e.g. CLI flags) win over file values.
        ``None`` overrides are ignored.
        '''
        path = Path(path)
        try:
            with path.open('rb') as f:
                values = tomllib.load(f)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f'Could not parse config "{path}": {exc}') from exc

        values.update({ k: v for k, v in overrides.items() if v is not None })
        logger.info(f'Loaded config from "{path}"')

        return cls.from_dict(values)

    def with_overrides(self, **overrides) -> 'ExperimentConfig':
        changes = { k: v for k, v in overrides.items() if v is not None }
        return replace(self, **changes) if changes else self

    def to_dict(self) -> dict:
        return to_jsonable(self)
