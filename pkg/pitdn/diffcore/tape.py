'''
Reverse-mode gradient tape over numpy arrays.

A ``GradTape`` records every operation applied to its ``Var`` nodes in execution order.
Since records are appended as the computation runs, the tape is already topologically
sorted and the backward sweep is a plain reverse iteration (no recursive graph walk, so
deep compositions such as network -> quadrature sum -> loss pose no recursion issues).

.. code-block:: python

    tape  = GradTape()
    theta = tape.watch(np.array([3.0]))
    loss  = (theta * theta).sum()

    tape.gradient(loss, theta)  # array([6.])

Operations are array-level, with numpy broadcasting; gradients flowing back into a
broadcast operand are summed over the broadcast axes. Only what the solver needs is
supported: elementwise arithmetic, ``tanh``/``sin``/``cos``/``exp``, constant powers,
2D matrix products, sparse (constant) matrix products, reshapes, indexing and
sum/mean reductions.
'''
import logging
from collections.abc import Callable

import numpy as np
import scipy.sparse as sp

from pitdn.errors import NonFiniteLossError


logger = logging.getLogger(__name__)

Backward = Callable[[np.ndarray], np.ndarray]


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    if grad.shape == shape:
        return grad

    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)

    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)

    return grad

def value_of(x):
    '''
    Raw numpy value behind a ``Var``, or the input itself as an array otherwise.
    '''
    if isinstance(x, Var):
        return x.value
    return np.asarray(x, dtype=np.float64)


class GradTape:
    '''
    Ordered record of a scalar computation.

    Instances are cheap; create one per loss evaluation. The tape holds references to
    every intermediate array until it is dropped.
    '''
    def __init__(self):
        self._nodes: list[Var] = []

    def __len__(self):
        return len(self._nodes)

    def watch(self, array) -> 'Var':
        '''
        Register a leaf variable (a copy of ``array``) on the tape.
        '''
        return self.record(np.array(array, dtype=np.float64), ())

    def record(
        self,
        value   : np.ndarray,
        parents : tuple[tuple['Var', Backward], ...],
    ) -> 'Var':
        var = Var(value, self, len(self._nodes), parents)
        self._nodes.append(var)

        return var

    def gradient(self, root: 'Var', leaf: 'Var') -> np.ndarray:
        '''
        Gradient of the scalar ``root`` with respect to ``leaf``.

        Parameters:
            root: scalar (size-1) variable recorded on this tape
            leaf: variable, typically created with ``watch``
        '''
        if root.tape is not self or leaf.tape is not self:
            raise ValueError('gradient requested across different tapes')

        if root.value.size != 1:
            raise ValueError(f'gradient root must be scalar, got shape {root.value.shape}')

        grads: list[np.ndarray | None] = [None] * (root.index + 1)
        grads[root.index] = np.ones_like(root.value)

        for node in reversed(self._nodes[leaf.index + 1:root.index + 1]):
            g = grads[node.index]
            if g is None:
                continue

            for parent, backward in node.parents:
                contrib = backward(g)
                if grads[parent.index] is None:
                    grads[parent.index] = contrib
                else:
                    grads[parent.index] = grads[parent.index] + contrib

            # intermediates are no longer needed once propagated
            grads[node.index] = None

        g = grads[leaf.index]
        if g is None:
            return np.zeros_like(leaf.value)

        return np.array(g, dtype=np.float64).reshape(leaf.value.shape)


class Var:
    '''
    Array-valued node on a ``GradTape``.

    ``__array_ufunc__ = None`` makes numpy defer mixed operations (``ndarray * Var``) to
    the reflected methods here, so constants can sit on either side of an operator.
    '''
    __slots__ = ('value', 'tape', 'index', 'parents')
    __array_ufunc__ = None

    def __init__(self, value, tape: GradTape, index: int, parents):
        self.value   = value
        self.tape    = tape
        self.index   = index
        self.parents = parents

    def __repr__(self):
        return f'<Var #{self.index} shape={self.value.shape}>'

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self):
        return self.value.ndim

    @property
    def size(self):
        return self.value.size

    def __len__(self):
        return len(self.value)

    def __add__(self, other):      return add(self, other)
    def __radd__(self, other):     return add(other, self)
    def __sub__(self, other):      return sub(self, other)
    def __rsub__(self, other):     return sub(other, self)
    def __mul__(self, other):      return mul(self, other)
    def __rmul__(self, other):     return mul(other, self)
    def __truediv__(self, other):  return div(self, other)
    def __rtruediv__(self, other): return div(other, self)
    def __matmul__(self, other):   return matmul(self, other)
    def __rmatmul__(self, other):  return matmul(other, self)
    def __neg__(self):             return neg(self)
    def __pow__(self, p):          return power(self, p)
    def __getitem__(self, key):    return getitem(self, key)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return reshape(self, shape)

    def sum(self):
        return vsum(self)

    def mean(self):
        return mean(self)


def _tape_of(*operands) -> GradTape:
    tape = None
    for op in operands:
        if isinstance(op, Var):
            if tape is not None and op.tape is not tape:
                raise ValueError('operands recorded on different tapes')
            tape = op.tape

    return tape

def _binary(a, b, value, da: Backward, db: Backward) -> Var:
    tape = _tape_of(a, b)
    parents = []

    if isinstance(a, Var):
        shape = a.shape
        parents.append((a, lambda g: _unbroadcast(da(g), shape)))
    if isinstance(b, Var):
        shape_b = b.shape
        parents.append((b, lambda g: _unbroadcast(db(g), shape_b)))

    return tape.record(value, tuple(parents))

def _unary(a: Var, value, da: Backward) -> Var:
    return a.tape.record(value, ((a, da),))


def add(a, b):
    av, bv = value_of(a), value_of(b)
    return _binary(a, b, av + bv, lambda g: g, lambda g: g)

def sub(a, b):
    av, bv = value_of(a), value_of(b)
    return _binary(a, b, av - bv, lambda g: g, lambda g: -g)

def mul(a, b):
    av, bv = value_of(a), value_of(b)
    return _binary(a, b, av * bv, lambda g: g * bv, lambda g: g * av)

def div(a, b):
    av, bv = value_of(a), value_of(b)
    return _binary(
        a, b, av / bv,
        lambda g: g / bv,
        lambda g: -g * av / (bv * bv),
    )

def neg(a: Var):
    return _unary(a, -a.value, lambda g: -g)

def power(a: Var, p: float):
    av = a.value
    if p == 0:
        return _unary(a, np.ones_like(av), lambda g: np.zeros_like(av))
    return _unary(a, av ** p, lambda g: g * p * av ** (p - 1))

def matmul(a, b):
    '''
    Product of 2D operands (or 2D @ 1D). Either side may be a constant array.
    '''
    av, bv = value_of(a), value_of(b)

    def da(g):
        if bv.ndim == 1:
            return np.outer(g, bv)
        return g @ bv.T

    def db(g):
        return av.T @ g

    return _binary(a, b, av @ bv, da, db)

def spmatmul(matrix: sp.spmatrix, a):
    '''
    Constant sparse matrix times a 1D variable; gradients only flow into ``a``.
    '''
    if not isinstance(a, Var):
        return matrix @ value_of(a)

    return _unary(a, matrix @ a.value, lambda g: matrix.T @ g)

def tanh(a: Var):
    y = np.tanh(a.value)
    return _unary(a, y, lambda g: g * (1.0 - y * y))

def sin(a: Var):
    av = a.value
    return _unary(a, np.sin(av), lambda g: g * np.cos(av))

def cos(a: Var):
    av = a.value
    return _unary(a, np.cos(av), lambda g: -g * np.sin(av))

def exp(a: Var):
    y = np.exp(a.value)
    return _unary(a, y, lambda g: g * y)

def reshape(a: Var, shape):
    old = a.shape
    return _unary(a, a.value.reshape(shape), lambda g: np.reshape(g, old))

def getitem(a: Var, key):
    shape = a.shape

    def da(g):
        out = np.zeros(shape, dtype=np.float64)
        np.add.at(out, key, g)
        return out

    return _unary(a, a.value[key], da)

def vsum(a: Var):
    shape = a.shape
    return _unary(
        a, np.asarray(a.value.sum()),
        lambda g: np.broadcast_to(g, shape).astype(np.float64)
    )

def mean(a: Var):
    shape, size = a.shape, a.size
    return _unary(
        a, np.asarray(a.value.mean()),
        lambda g: np.broadcast_to(g / size, shape).astype(np.float64)
    )


def param_gradient(loss, params):
    '''
    Gradient of a scalar loss closure with respect to a ``ParamVector``.

    The closure is called once with a traced copy of ``params`` (its flat array is a tape
    leaf) and must return a scalar ``Var`` built from it, or a plain number when the loss
    does not depend on the parameters at all.

    Parameters:
        loss:   ``ParamVector -> Var | float``
        params: parameter point at which to differentiate

    Returns:
        Gradient array with one entry per parameter.
    '''
    tape   = GradTape()
    traced = params.traced(tape)
    out    = loss(traced)

    value = float(np.asarray(value_of(out)).reshape(-1)[0])
    if not np.isfinite(value):
        raise NonFiniteLossError(
            f'loss evaluated to {value}',
            params=np.array(value_of(params.flat)),
        )

    if not isinstance(out, Var):
        return np.zeros(params.count, dtype=np.float64)

    return tape.gradient(out, traced.flat)
