'''
Primitive dispatch between plain numpy values and tape variables.

Jet channels can hold floats, arrays or ``Var`` nodes. Arithmetic operators already
dispatch through ``Var``'s dunder methods; the transcendental primitives below pick the
tape op or the numpy ufunc depending on their argument.
'''
import numpy as np

from pitdn.diffcore import tape
from pitdn.diffcore.tape import Var, value_of


def is_traced(x) -> bool:
    return isinstance(x, Var)

def tanh(x):
    return tape.tanh(x) if isinstance(x, Var) else np.tanh(x)

def sin(x):
    return tape.sin(x) if isinstance(x, Var) else np.sin(x)

def cos(x):
    return tape.cos(x) if isinstance(x, Var) else np.cos(x)

def exp(x):
    return tape.exp(x) if isinstance(x, Var) else np.exp(x)

def power(x, p: float):
    return tape.power(x, p) if isinstance(x, Var) else np.power(x, p)

def matmul(a, b):
    if isinstance(a, Var) or isinstance(b, Var):
        return tape.matmul(a, b)
    return np.asarray(a) @ np.asarray(b)

def spmatmul(matrix, a):
    return tape.spmatmul(matrix, a)

def mean(x):
    if isinstance(x, Var):
        return tape.mean(x)
    return np.asarray(np.mean(x))

def reshape(x, shape):
    if isinstance(x, Var):
        return tape.reshape(x, shape)
    return np.reshape(x, shape)

def broadcast(x, like):
    '''
    Broadcast a constant to the shape of ``like``; ``Var`` operands pass through.
    '''
    if isinstance(x, Var):
        return x
    return np.broadcast_to(np.asarray(x, dtype=np.float64), np.shape(value_of(like))).copy()

__all__ = [
    'is_traced', 'value_of', 'tanh', 'sin', 'cos', 'exp', 'power',
    'matmul', 'spmatmul', 'mean', 'reshape', 'broadcast',
]
