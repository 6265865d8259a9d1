'''
Compact fully connected tanh network over ``(x, t)``.

The network is described by ``MlpConfig`` and its weights live in a single flat array
wrapped by ``ParamVector``, with layer-shape metadata used to slice out ``(W, b)`` pairs.
Layers are stored in order, each as ``W`` (row-major, shape ``(fan_out, fan_in)``) followed
by ``b`` (``fan_out``), so the default ``[2, 10, 10, 10, 1]`` network has 261 entries.

``forward`` pushes ``Jet2`` inputs through the network, so one call yields the output value
and every requested input partial for a whole batch of points. When the ``ParamVector`` is
traced on a ``GradTape`` the same call is differentiable in the parameters.

Checkpoints
-----------
Parameters persist to a small binary file (all little-endian):

.. code-block:: text

    8 bytes    magic  b"PITDNCK1"
    uint32     number of layer sizes L
    L x uint32 layer sizes
    int64      initialization seed
    uint64     parameter count P
    P x f8     flat parameters
'''
import logging
from pathlib import Path
from dataclasses import dataclass

import numpy as np

from pitdn.diffcore import ops
from pitdn.diffcore.jet import Jet2
from pitdn.diffcore.tape import GradTape, Var, value_of
from pitdn.errors import ConfigError, ShapeMismatchError


logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b'PITDNCK1'


@dataclass(frozen=True)
class MlpConfig:
    layer_sizes : tuple[int, ...] = (2, 10, 10, 10, 1)
    seed        : int = 0

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, 'layer_sizes', sizes)

        if len(sizes) < 2:
            raise ConfigError(f'layer_sizes needs at least two entries, got {sizes}')
        if sizes[0] != 2:
            raise ConfigError(f'first layer must take the 2 inputs (x, t), got {sizes[0]}')
        if sizes[-1] != 1:
            raise ConfigError(f'last layer must have a single output, got {sizes[-1]}')
        if any(s < 1 for s in sizes):
            raise ConfigError(f'layer sizes must be positive, got {sizes}')

    @property
    def n_params(self) -> int:
        return param_count(self.layer_sizes)


def param_count(layer_sizes) -> int:
    return sum(
        fan_out * fan_in + fan_out
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:])
    )


class ParamVector:
    '''
    Flat network parameters plus the layer sizes needed to interpret them.

    ``flat`` is a float64 array, or a ``Var`` for a traced copy produced by ``traced``.
    '''
    def __init__(self, flat, layer_sizes):
        self.layer_sizes = tuple(int(s) for s in layer_sizes)

        if not isinstance(flat, Var):
            flat = np.array(flat, dtype=np.float64).reshape(-1)

        expected = param_count(self.layer_sizes)
        if flat.shape != (expected,):
            raise ShapeMismatchError(
                f'parameter array of shape {flat.shape} does not match layer sizes '
                f'{self.layer_sizes} ({expected} parameters)'
            )

        self.flat = flat

    def __repr__(self):
        return f'<ParamVector {list(self.layer_sizes)} count={self.count}>'

    @property
    def count(self) -> int:
        return param_count(self.layer_sizes)

    @property
    def is_traced(self) -> bool:
        return isinstance(self.flat, Var)

    def unflatten(self) -> list[tuple]:
        '''
        ``[(W, b), ...]`` views of ``flat``, one pair per layer.
        '''
        layers = []
        offset = 0
        for fan_in, fan_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            n_w = fan_out * fan_in
            W = ops.reshape(self.flat[offset:offset + n_w], (fan_out, fan_in))
            offset += n_w
            b = self.flat[offset:offset + fan_out]
            offset += fan_out
            layers.append((W, b))

        return layers

    @classmethod
    def flatten(cls, layers, layer_sizes=None) -> 'ParamVector':
        '''
        Inverse of ``unflatten`` for plain arrays.
        '''
        if layer_sizes is None:
            layer_sizes = [np.shape(layers[0][0])[1]] + [np.shape(W)[0] for W, _ in layers]

        chunks = []
        for W, b in layers:
            chunks.append(np.asarray(W, dtype=np.float64).reshape(-1))
            chunks.append(np.asarray(b, dtype=np.float64).reshape(-1))

        return cls(np.concatenate(chunks), layer_sizes)

    def with_flat(self, flat) -> 'ParamVector':
        return ParamVector(flat, self.layer_sizes)

    def traced(self, tape: GradTape) -> 'ParamVector':
        '''
        Copy whose flat array is a leaf on ``tape``.
        '''
        return ParamVector(tape.watch(value_of(self.flat)), self.layer_sizes)

    def detached(self) -> 'ParamVector':
        return ParamVector(value_of(self.flat).copy(), self.layer_sizes)


def init_xavier(config: MlpConfig) -> ParamVector:
    '''
    Uniform Glorot initialization with zero biases, deterministic under ``config.seed``.
    '''
    rng    = np.random.default_rng(config.seed)
    layers = []

    for fan_in, fan_out in zip(config.layer_sizes[:-1], config.layer_sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        W = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        b = np.zeros(fan_out)
        layers.append((W, b))

    return ParamVector.flatten(layers, config.layer_sizes)

def forward(params: ParamVector, x: Jet2, t: Jet2) -> Jet2:
    '''
    Evaluate the network on coordinate jets.

    ``x`` and ``t`` carry values of equal shape (a scalar or a 1D batch); the result has
    the same shape and the channels common to both inputs.
    '''
    if params.layer_sizes[0] != 2 or params.layer_sizes[-1] != 1:
        raise ShapeMismatchError(
            f'network must map 2 inputs to 1 output, got layer sizes {params.layer_sizes}'
        )

    scalar = np.ndim(value_of(x.value)) == 0
    layers = params.unflatten()

    W, b = layers[0]
    h = x * W[:, 0:1] + t * W[:, 1:2] + ops.reshape(b, (-1, 1))

    for W, b in layers[1:]:
        h = h.tanh().affine(W, b)

    out = h[0]
    if scalar:
        out = out[0]

    return out

def network_field(params: ParamVector):
    '''
    Adapt ``forward`` to the ``(x, t) -> Jet2`` field convention.
    '''
    def field(x: Jet2, t: Jet2) -> Jet2:
        return forward(params, x, t)

    return field

def save_checkpoint(path: str | Path, params: ParamVector, seed: int = 0):
    path = Path(path)
    flat = np.asarray(value_of(params.flat), dtype='<f8')

    with path.open('wb') as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(np.array([len(params.layer_sizes)], dtype='<u4').tobytes())
        f.write(np.array(params.layer_sizes, dtype='<u4').tobytes())
        f.write(np.array([seed], dtype='<i8').tobytes())
        f.write(np.array([flat.size], dtype='<u8').tobytes())
        f.write(flat.tobytes())

    logger.info(f'Wrote checkpoint ({flat.size} parameters) to "{path}"')

def load_checkpoint(path: str | Path) -> tuple[ParamVector, int]:
    '''
    Read a checkpoint written by ``save_checkpoint``.

    Returns:
        ``(params, seed)``
    '''
    data = Path(path).read_bytes()

    if data[:8] != CHECKPOINT_MAGIC:
        raise ShapeMismatchError(f'"{path}" is not a parameter checkpoint (bad magic)')

    offset = 8
    (n_layers,) = np.frombuffer(data, dtype='<u4', count=1, offset=offset)
    offset += 4
    sizes = np.frombuffer(data, dtype='<u4', count=int(n_layers), offset=offset)
    offset += 4 * int(n_layers)
    (seed,) = np.frombuffer(data, dtype='<i8', count=1, offset=offset)
    offset += 8
    (count,) = np.frombuffer(data, dtype='<u8', count=1, offset=offset)
    offset += 8

    expected = param_count(sizes.tolist())
    if int(count) != expected or len(data) != offset + 8 * expected:
        raise ShapeMismatchError(
            f'checkpoint "{path}" declares {int(count)} parameters; layer sizes '
            f'{sizes.tolist()} need {expected}'
        )

    flat = np.frombuffer(data, dtype='<f8', count=expected, offset=offset).astype(np.float64)

    return ParamVector(flat, sizes.tolist()), int(seed)
