'''
Property checks that back the solver's theory with measurements.

Each check returns a ``CheckResult`` and needs no training:

- ``quadrature``: observed order of the trapezoidal reconstruction
- ``propagation``: sampled bounds on how perturbations of the learned field propagate
  through the reconstruction
- ``wirtinger``: mode-wise amplification of time differentiation for zero-mean modes
- ``gradients``: jets and parameter gradients against finite differences
- ``equivalence``: constancy in time of the primal residual of a (trained) field
'''
import math
import logging
from dataclasses import dataclass, field

import numpy as np

from pitdn.diffcore import jet
from pitdn.diffcore.jet import Jet2, jet_eval
from pitdn.diffcore.oracle import check_jet, check_param_gradient
from pitdn.diffcore.tape import value_of
from pitdn.net import MlpConfig, init_xavier, network_field
from pitdn.objectives import OBJECTIVES
from pitdn.problem import ProblemSpec, FieldBundle, eval_primal_residual
from pitdn.problems import PROBLEMS
from pitdn.sampling import CollocationCounts, build_collocation
from pitdn.util.generic import log_report, status_text
from pitdn.volterra import QuadratureConfig, QuadratureBatch, quadrature_nodes, reconstruct1, reconstruct2


logger = logging.getLogger(__name__)

QUADRATURE_K = (5, 10, 20, 40, 80)
SLOPE_BAND   = (1.8, 2.2)


@dataclass
class CheckResult:
    '''
    ``passed`` is ``None`` for diagnostic runs with no pass criterion.
    '''
    name    : str
    passed  : bool | None
    value   : float | None = None
    details : dict = field(default_factory=dict)
    note    : str = ''

    def log(self):
        lines = [f'->  Status : {status_text(self.passed)}']
        if self.value is not None:
            lines.append(f'->  Value  : {self.value:.6g}')
        if self.note:
            lines.append(f'->  Note   : {self.note}')
        for key, value in self.details.items():
            lines.append(f'->  {key} : {value}')

        log_report(logger, f'Check: {self.name}', lines)


INTEGRANDS = {
    'sin'    : (lambda x, s: jet.sin(s), 1.0 - math.cos(1.0)),
    'exp'    : (lambda x, s: jet.exp(s), math.e - 1.0),
    'linear' : (lambda x, s: 0.0 * x + s, 0.5),
}

def _zero(x):
    return 0.0 * x

def check_quadrature(integrand: str = 'sin', ks=QUADRATURE_K) -> CheckResult:
    '''
    Fit the log-log slope of the reconstruction error of ``int_0^1 v`` against ``K``.

    Linear integrands are integrated exactly; the check then reports an undefined slope
    and passes.
    '''
    v, exact = INTEGRANDS[integrand]

    errors = []
    for k in ks:
        u = reconstruct1(v, _zero, 0.0, 1.0, QuadratureConfig(k), channels=())
        errors.append(abs(float(value_of(u.value)) - exact))

    details = { 'K': list(ks), 'errors': errors }
    if max(errors) < 1e-13:
        return CheckResult(f'quadrature[{integrand}]', True, None, details, 'exact, slope undefined')

    slope = -np.polyfit(np.log(ks), np.log(errors), 1)[0]
    lo, hi = SLOPE_BAND

    return CheckResult(f'quadrature[{integrand}]', bool(lo <= slope <= hi), float(slope), details)


class TrigField:
    '''
    Random trigonometric polynomial ``sum a_mn sin(m pi x + p_m) cos(n pi s + q_n)`` on
    ``[0, 1] x [0, 1]``, usable as a jet field.
    '''
    def __init__(self, rng: np.random.Generator, modes: int = 4):
        self.a   = rng.normal(size=(modes, modes))
        self.phx = rng.uniform(0, 2*np.pi, size=modes)
        self.pht = rng.uniform(0, 2*np.pi, size=modes)

    def __call__(self, x, s):
        spatial  = [jet.sin((m + 1) * np.pi * x + float(self.phx[m])) for m in range(len(self.phx))]
        temporal = [jet.cos(n * np.pi * s + float(self.pht[n])) for n in range(len(self.pht))]

        out = None
        for m, sx in enumerate(spatial):
            mix = sum(float(self.a[m, n]) * ct for n, ct in enumerate(temporal))
            term = sx * mix
            out = term if out is None else out + term

        return out

def _constant_field(k):
    return lambda x, s: 0.0 * x + k

def _cauchy_schwarz_ratios(v, x, t, channel=None):
    '''
    ``||int_0^t v|| / (sqrt(t) ||v||_{(0,t]})`` on the spatial grid ``x``, using the same
    trapezoid weights for both norms. ``channel`` selects a spatial derivative instead of
    the value.
    '''
    q      = QuadratureConfig(max(1, round(100 / t)))
    batch  = QuadratureBatch(x, np.full_like(x, t), q)
    chans  = (channel,) if channel else ()

    rec   = reconstruct1(v, _zero, x, np.full_like(x, t), q, channels=chans, batch=batch)
    nodes = v(Jet2.variable(batch.node_x, 'x', chans), Jet2.variable(batch.node_t, 't', chans))

    integral = rec.value if channel is None else rec.raw(channel)
    density  = nodes.value if channel is None else nodes.raw(channel)
    integral = np.broadcast_to(value_of(0.0 if integral is None else integral), x.shape)
    density  = np.broadcast_to(value_of(0.0 if density is None else density), batch.node_x.shape)

    num_sq = float(np.mean(integral**2))
    den_sq = float(np.mean(batch.weights @ (density**2)))

    return num_sq, den_sq

def check_propagation(
    n_fields : int   = 50,
    seed     : int   = 0,
    times    = (0.25, 0.5, 1.0),
    nx       : int   = 256,
    tol      : float = 1.05,
) -> CheckResult:
    '''
    Sample the perturbation bounds of the reconstruction on random smooth fields:

    - ``||int_0^t dv|| <= sqrt(t) ||dv||_{(0,t]}`` at each ``t``
    - the same over the horizon, ``sup_t ||int_0^t dv|| <= sqrt(T) ||dv||_{(0,T]}``
    - the same for the ``x``-derivative
    - the reconstructed ``d_t`` channel equals the field at the query point bit for bit
    '''
    rng    = np.random.default_rng(seed)
    x      = (np.arange(nx) + 0.5) / nx
    horizon = max(times)

    worst = { 'pointwise': 0.0, 'uniform': 0.0, 'gradient': 0.0 }
    derivative_exact = True

    for _ in range(n_fields):
        v = TrigField(rng)

        _, den_T = _cauchy_schwarz_ratios(v, x, horizon)
        for t in times:
            num, den = _cauchy_schwarz_ratios(v, x, t)
            if den > 0:
                worst['pointwise'] = max(worst['pointwise'], math.sqrt(num / (t * den)))
            if den_T > 0:
                worst['uniform'] = max(worst['uniform'], math.sqrt(num / (horizon * den_T)))

            gnum, gden = _cauchy_schwarz_ratios(v, x, t, 'd_x')
            if gden > 0:
                worst['gradient'] = max(worst['gradient'], math.sqrt(gnum / (t * gden)))

            u  = reconstruct1(v, _zero, x, np.full_like(x, t), QuadratureConfig(), channels=('d_t',))
            vt = v(Jet2.constant(x, ()), Jet2.constant(np.full_like(x, t), ()))
            derivative_exact &= bool(np.array_equal(u.d_t, vt.value))

    passed = all(r <= tol for r in worst.values()) and derivative_exact
    details = { **{ k: round(r, 6) for k, r in worst.items() }, 'd_t exact': derivative_exact }

    return CheckResult('propagation', passed, worst['pointwise'], details)

def propagation_ratio(v, t: float, nx: int = 256) -> float:
    '''
    Single-field ``||int_0^t v|| / (sqrt(t) ||v||)`` on ``[0, 1]``; ``0`` for a zero field.
    '''
    x = (np.arange(nx) + 0.5) / nx
    num, den = _cauchy_schwarz_ratios(v, x, t)
    if den == 0:
        return 0.0
    return math.sqrt(num / (t * den))

def check_wirtinger(t_end: float = 1.0, modes=range(1, 6), n_nodes: int = 10_000) -> CheckResult:
    '''
    For zero-mean modes ``c(t) = sin(2 pi k t / T)`` verify

    .. code-block:: text

        int |c'|^2 / int |c|^2 >= pi^2 / T^2

    and that the ratio grows as ``k^2``. A constant mode is reported as skipped, since it
    does not satisfy the zero-mean hypothesis.
    '''
    q = QuadratureConfig(math.ceil((n_nodes - 1) / t_end))
    nodes, weights = quadrature_nodes(t_end, q)
    bound = math.pi**2 / t_end**2

    def ratio(c):
        j = jet_eval(c, np.zeros_like(nodes), nodes, ('d_t',))
        value = np.broadcast_to(value_of(j.value), nodes.shape)
        slope = np.broadcast_to(value_of(j.d_t), nodes.shape)

        mean = float(weights @ value) / t_end
        energy = float(weights @ value**2)
        if energy == 0 or abs(mean) > 1e-8 * math.sqrt(energy / t_end):
            return None
        return float(weights @ slope**2) / energy

    ratios, skipped = {}, []
    if ratio(lambda x, t: 0.0 * t + 1.0) is None:
        skipped.append('constant')

    for k in modes:
        r = ratio(lambda x, t, k=k: jet.sin(2*math.pi*k * t / t_end))
        if r is None:
            skipped.append(f'k={k}')
        else:
            ratios[k] = r

    bound_ok  = all(r >= bound * (1 - 1e-9) for r in ratios.values())
    growth    = { k: r / ratios[1] for k, r in ratios.items() } if 1 in ratios else {}
    growth_ok = all(abs(g / k**2 - 1) <= 1e-6 for k, g in growth.items())

    details = {
        'bound'   : bound,
        'ratios'  : { k: round(r, 6) for k, r in ratios.items() },
        'growth'  : { k: round(g, 6) for k, g in growth.items() },
        'skipped' : skipped,
    }
    passed = bool(ratios) and bound_ok and growth_ok

    return CheckResult('wirtinger', passed, min(ratios.values()) / bound if ratios else None, details)

def _composite(x, t):
    return (
        jet.tanh(x * t)
        + jet.sin(x - t) * jet.exp(0.3 * x)
        + 1.0 / (x * x + 1.0)
        + 0.5 * (t * t + 1.0) ** 0.5
        - jet.cos(2.0 * t) * x
    )

def check_gradients(seed: int = 0, n_points: int = 100) -> CheckResult:
    '''
    Finite-difference agreement of jets (a primitive composite and a random network) and
    of parameter gradients for every benchmark loss at fresh initialization.
    '''
    rng    = np.random.default_rng(seed)
    points = rng.uniform(-2, 2, size=(n_points, 2))
    params = init_xavier(MlpConfig(seed=seed))

    results = {
        'jet[composite]' : check_jet(_composite, points),
        'jet[network]'   : check_jet(network_field(params), points),
    }

    counts = CollocationCounts(20, 10, 10)
    for name, factory in PROBLEMS.items():
        spec   = factory()
        colloc = build_collocation(spec, counts, seed)
        for method, objective_cls in OBJECTIVES.items():
            objective = objective_cls(spec, colloc)
            results[f'grad[{name}/{method}]'] = check_param_gradient(objective.loss, params, seed=seed)

    details = { name: f'{status_text(r.passed)} {max(r.max_error.values()):.2e}' for name, r in results.items() }
    worst   = max(max(r.max_error.values()) for r in results.values())

    return CheckResult('gradients', all(r.passed for r in results.values()), worst, details)

def equivalence_residuals(field, spec: ProblemSpec, q: QuadratureConfig, n_x: int = 20, n_t: int = 11):
    '''
    Primal residual of the reconstruction of ``field`` on ``n_x`` fixed interior ``x``
    values at ``n_t`` uniform times in ``[0, T]``.

    Returns:
        ``(times, R)`` with ``R`` of shape ``(n_t, n_x)``
    '''
    d = spec.domain
    xs = np.linspace(d.x_lo, d.x_hi, n_x + 2)[1:-1]
    ts = np.linspace(0.0, d.t_end, n_t)
    X, T = np.meshgrid(xs, ts)
    x, t = X.ravel(), T.ravel()

    if spec.order == 1:
        u = reconstruct1(field, spec.ic_u0, x, t, q, channels=('d_x', 'd_xx', 'd_t'), t_end=d.t_end)
        fields = FieldBundle(u=u)
    else:
        u, v = reconstruct2(
            field, spec.ic_u0, spec.ic_v0, x, t, q, channels=('d_x', 'd_xx'), t_end=d.t_end
        )
        a = field(Jet2.constant(x, ()), Jet2.constant(t, ()))
        fields = FieldBundle(u=u, v=v, a=a)

    R = np.broadcast_to(value_of(eval_primal_residual(spec, fields, x, t)), x.shape)
    return ts, np.asarray(R).reshape(n_t, n_x)

def check_equivalence(
    field,
    spec       : ProblemSpec,
    q          : QuadratureConfig | None = None,
    final_loss : float | None = None,
    tolerance  : float | None = None,
) -> CheckResult:
    '''
    Report ``max_t |R(x, t) - R(x, 0)|`` and ``max |R(x, 0)|`` for a learned derivative
    field. The pass threshold is ``10 sqrt(final_loss)`` when a training loss is given,
    else ``tolerance``; with neither the check is diagnostic only.
    '''
    q = q or QuadratureConfig()
    _, R = equivalence_residuals(field, spec, q)

    drift  = float(np.max(np.abs(R - R[0])))
    anchor = float(np.max(np.abs(R[0])))

    if final_loss is not None:
        tolerance = 10 * math.sqrt(final_loss)

    passed = None
    if tolerance is not None:
        passed = drift <= tolerance and anchor <= tolerance

    details = { 'drift': drift, 'anchor': anchor, 'threshold': tolerance, 'm_per_unit_time': q.m_per_unit_time }
    return CheckResult(f'equivalence[{spec.name}]', passed, drift, details)
