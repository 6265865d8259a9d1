'''
Second-order forward jets in two inputs.

A ``Jet2`` carries a value together with a fixed set of its partial derivatives in the
inputs ``x`` and ``t``:

.. code-block:: text

    d_x, d_t, d_xx, d_xt, d_tt

Derivatives are pushed forward through every primitive (hyper-dual style), so a single
evaluation of a composite function yields all requested partials exactly. Each channel
may hold a float, a numpy array (one entry per evaluation point) or a tape ``Var``, which
makes the same forward pass usable for a batch of collocation points and differentiable
in network parameters.

Only requested channels are computed. Requests are closed under their dependencies
(``d_xx`` needs ``d_x``, ``d_xt`` needs both first-order channels, ``d_tt`` needs
``d_t``), and reading a channel that was not requested raises ``MissingChannelError``.
Internally an absent part (``None``) is a structural zero; the public accessors return
``0.0`` for it.

.. code-block:: python

    j = jet_eval(lambda x, t: x * t, 2.0, 3.0)
    j.value, j.d_x, j.d_t, j.d_xt   # 6.0, 3.0, 2.0, 1.0
'''
import logging
from collections.abc import Callable, Iterable

import numpy as np

from pitdn.diffcore import ops
from pitdn.diffcore.tape import Var, value_of
from pitdn.errors import JetEvaluationError, MissingChannelError


logger = logging.getLogger(__name__)

CHANNELS = ('d_x', 'd_t', 'd_xx', 'd_xt', 'd_tt')
ALL_CHANNELS = frozenset(CHANNELS)

_REQUIRES = {
    'd_x'  : (),
    'd_t'  : (),
    'd_xx' : ('d_x',),
    'd_xt' : ('d_x', 'd_t'),
    'd_tt' : ('d_t',),
}


def close_channels(channels: str | Iterable[str] | None) -> frozenset[str]:
    '''
    Normalize a channel request and add the channels it depends on.

    Parameters:
        channels: ``"all"``, ``None`` (value only) or an iterable of channel names
    '''
    if channels is None:
        return frozenset()
    if isinstance(channels, str):
        if channels == 'all':
            return ALL_CHANNELS
        channels = (channels,)

    closed = set()
    for name in channels:
        if name not in _REQUIRES:
            raise ValueError(f'Unknown jet channel "{name}"; expected one of {CHANNELS}')
        closed.add(name)
        closed.update(_REQUIRES[name])

    return frozenset(closed)

def _term(*factors):
    for f in factors:
        if f is None:
            return None

    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out

def _total(*terms):
    present = [term for term in terms if term is not None]
    if not present:
        return None

    out = present[0]
    for term in present[1:]:
        out = out + term
    return out


class Jet2:
    __slots__ = ('value', 'parts', 'channels')
    __array_ufunc__ = None

    def __init__(self, value, parts: dict | None = None, channels=ALL_CHANNELS):
        self.value    = value
        self.channels = frozenset(channels)

        parts = parts or {}
        self.parts = { name: parts.get(name) for name in self.channels }

    def __repr__(self):
        return f'<Jet2 channels={sorted(self.channels)} value={value_of(self.value)!r}>'

    @classmethod
    def constant(cls, value, channels=ALL_CHANNELS) -> 'Jet2':
        if not isinstance(value, Var):
            value = np.asarray(value, dtype=np.float64)
        return cls(value, None, channels)

    @classmethod
    def variable(cls, value, axis: str, channels='all') -> 'Jet2':
        '''
        Seed a coordinate jet: ``d_x = 1`` for ``axis="x"`` or ``d_t = 1`` for ``axis="t"``.
        '''
        if axis not in ('x', 't'):
            raise ValueError(f'Jet axis must be "x" or "t", got "{axis}"')

        channels = close_channels(channels)
        value    = np.asarray(value_of(value), dtype=np.float64)
        seed     = f'd_{axis}'

        parts = {}
        if seed in channels:
            parts[seed] = np.ones_like(value)

        return cls(value, parts, channels)

    def zeros_like(self) -> 'Jet2':
        return Jet2.constant(np.zeros_like(value_of(self.value)), self.channels)

    def raw(self, name: str):
        '''
        Internal part for ``name``; ``None`` marks a structural zero.
        '''
        if name not in self.channels:
            raise MissingChannelError(name, self.channels)
        return self.parts[name]

    def _get(self, name: str):
        part = self.raw(name)
        return 0.0 if part is None else part

    @property
    def d_x(self):  return self._get('d_x')
    @property
    def d_t(self):  return self._get('d_t')
    @property
    def d_xx(self): return self._get('d_xx')
    @property
    def d_xt(self): return self._get('d_xt')
    @property
    def d_tt(self): return self._get('d_tt')

    def has(self, name: str) -> bool:
        return name in self.channels

    def restrict(self, channels) -> 'Jet2':
        '''
        Drop channels outside ``channels`` (after closure).
        '''
        keep = close_channels(channels) & self.channels
        return Jet2(self.value, { k: self.parts[k] for k in keep }, keep)

    def with_part(self, name: str, part) -> 'Jet2':
        '''
        Copy with one channel overwritten, used by the reconstruction operators to set
        Leibniz-rule time derivatives exactly.
        '''
        if name not in self.channels:
            raise MissingChannelError(name, self.channels)

        parts = dict(self.parts)
        parts[name] = part
        return Jet2(self.value, parts, self.channels)

    # arithmetic
    def _lift(self, other) -> 'Jet2':
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(other, ALL_CHANNELS)

    def __add__(self, other):
        o  = self._lift(other)
        ch = self.channels & o.channels
        parts = { k: _total(self.parts[k], o.parts[k]) for k in ch }
        return Jet2(self.value + o.value, parts, ch)

    __radd__ = __add__

    def __neg__(self):
        parts = { k: None if p is None else -p for k, p in self.parts.items() }
        return Jet2(-self.value, parts, self.channels)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            parts = {
                k: None if p is None else p * other
                for k, p in self.parts.items()
            }
            return Jet2(self.value * other, parts, self.channels)

        a, b = self, other
        ch = a.channels & b.channels
        ap, bp = a.parts, b.parts
        av, bv = a.value, b.value

        parts = {}
        if 'd_x' in ch:
            parts['d_x'] = _total(_term(ap['d_x'], bv), _term(av, bp['d_x']))
        if 'd_t' in ch:
            parts['d_t'] = _total(_term(ap['d_t'], bv), _term(av, bp['d_t']))
        if 'd_xx' in ch:
            parts['d_xx'] = _total(
                _term(ap['d_xx'], bv),
                _term(2.0, ap['d_x'], bp['d_x']),
                _term(av, bp['d_xx']),
            )
        if 'd_xt' in ch:
            parts['d_xt'] = _total(
                _term(ap['d_xt'], bv),
                _term(ap['d_x'], bp['d_t']),
                _term(ap['d_t'], bp['d_x']),
                _term(av, bp['d_xt']),
            )
        if 'd_tt' in ch:
            parts['d_tt'] = _total(
                _term(ap['d_tt'], bv),
                _term(2.0, ap['d_t'], bp['d_t']),
                _term(av, bp['d_tt']),
            )

        return Jet2(av * bv, parts, ch)

    __rmul__ = __mul__

    def reciprocal(self) -> 'Jet2':
        v = self.value
        if np.any(value_of(v) == 0):
            raise JetEvaluationError('div', 'division by zero')

        inv = 1.0 / v
        return self._unary(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            if np.any(value_of(other) == 0):
                raise JetEvaluationError('div', 'division by zero')
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet2):
            raise JetEvaluationError('pow', 'only constant exponents are supported')

        p = float(p)
        if p == 0.0:
            return Jet2.constant(np.ones_like(value_of(self.value)), self.channels)
        if p == 1.0:
            return self

        v = value_of(self.value)
        if not p.is_integer() and np.any(v < 0):
            raise JetEvaluationError('pow', f'fractional power {p} of a negative base')
        if p < 2.0 and np.any(v == 0):
            raise JetEvaluationError('pow', f'power {p} is not twice differentiable at 0')

        x = self.value
        return self._unary(
            ops.power(x, p),
            p * ops.power(x, p - 1.0),
            p * (p - 1.0) * ops.power(x, p - 2.0),
        )

    def _unary(self, g, g1, g2) -> 'Jet2':
        '''
        Chain rule for ``g(self)`` given ``g`` and its first two derivatives evaluated at
        ``self.value``. ``g2`` is only read when a second-order channel is present.
        '''
        p, ch = self.parts, self.channels

        parts = {}
        if 'd_x' in ch:
            parts['d_x'] = _term(g1, p['d_x'])
        if 'd_t' in ch:
            parts['d_t'] = _term(g1, p['d_t'])
        if 'd_xx' in ch:
            parts['d_xx'] = _total(_term(g2, p['d_x'], p['d_x']), _term(g1, p['d_xx']))
        if 'd_xt' in ch:
            parts['d_xt'] = _total(_term(g2, p['d_x'], p['d_t']), _term(g1, p['d_xt']))
        if 'd_tt' in ch:
            parts['d_tt'] = _total(_term(g2, p['d_t'], p['d_t']), _term(g1, p['d_tt']))

        return Jet2(g, parts, ch)

    def tanh(self) -> 'Jet2':
        y  = ops.tanh(self.value)
        y1 = 1.0 - y * y
        return self._unary(y, y1, -2.0 * y * y1)

    def sin(self) -> 'Jet2':
        s = ops.sin(self.value)
        return self._unary(s, ops.cos(self.value), -s)

    def cos(self) -> 'Jet2':
        c = ops.cos(self.value)
        return self._unary(c, -ops.sin(self.value), -c)

    def exp(self) -> 'Jet2':
        e = ops.exp(self.value)
        return self._unary(e, e, e)

    # array structure
    def affine(self, W, b) -> 'Jet2':
        '''
        Layer map ``W @ self + b`` for a jet whose value is a ``(fan_in, n)`` matrix;
        ``b`` is broadcast over points. Linear, so every part maps through ``W``.
        '''
        parts = {
            k: None if p is None else ops.matmul(W, p)
            for k, p in self.parts.items()
        }
        value = ops.matmul(W, self.value) + ops.reshape(b, (-1, 1))

        return Jet2(value, parts, self.channels)

    def __getitem__(self, key) -> 'Jet2':
        parts = {
            k: None if p is None else p[key]
            for k, p in self.parts.items()
        }
        return Jet2(self.value[key], parts, self.channels)


def tanh(u):
    return u.tanh() if isinstance(u, Jet2) else ops.tanh(u)

def sin(u):
    return u.sin() if isinstance(u, Jet2) else ops.sin(u)

def cos(u):
    return u.cos() if isinstance(u, Jet2) else ops.cos(u)

def exp(u):
    return u.exp() if isinstance(u, Jet2) else ops.exp(u)

def jet_eval(
    f        : Callable[[Jet2, Jet2], Jet2],
    x,
    t,
    channels : str | Iterable[str] = 'all',
) -> Jet2:
    '''
    Evaluate ``f`` on coordinate jets seeded at ``(x, t)``.

    ``x`` and ``t`` may be scalars or equally shaped arrays. A plain number returned by
    ``f`` is promoted to a constant jet.
    '''
    channels = close_channels(channels)

    out = f(Jet2.variable(x, 'x', channels), Jet2.variable(t, 't', channels))
    if not isinstance(out, Jet2):
        out = Jet2.constant(out, channels)

    return out

def as_jet(value, channels=ALL_CHANNELS) -> Jet2:
    return value if isinstance(value, Jet2) else Jet2.constant(value, channels)
