from abc import abstractmethod
from typing import Protocol, TYPE_CHECKING
from dataclasses import is_dataclass, asdict

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    from pitdn.diffcore.jet import Jet2


# custom types
FloatArray = npt.NDArray[np.float64]

class JetField(Protocol):
    """Protocol for jet-valued fields f(x, t) evaluated on seeded coordinate jets."""

    @abstractmethod
    def __call__(self, x: 'Jet2', t: 'Jet2') -> 'Jet2':
        pass

class ValueAndGrad(Protocol):
    """Protocol for loss closures consumed by the optimizers."""

    @abstractmethod
    def __call__(self, theta: FloatArray) -> tuple[object, FloatArray]:
        pass

# type checking/conversion methods
def is_dataclass_instance(obj) -> bool:
    return is_dataclass(obj) and not isinstance(obj, type)

def to_jsonable(obj):
    '''
    Recursively convert dataclasses, numpy scalars/arrays, tuples and paths into plain
    JSON-serializable Python objects.
    '''
    if is_dataclass_instance(obj):
        return to_jsonable(asdict(obj))
    elif isinstance(obj, dict):
        return { str(k):to_jsonable(v) for k,v in obj.items() }
    elif isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    elif isinstance(obj, np.ndarray):
        return obj.tolist()
    elif isinstance(obj, np.generic):
        return obj.item()
    elif hasattr(obj, '__fspath__'):
        return str(obj)

    return obj
