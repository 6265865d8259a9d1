'''
Ground-truth providers.

Advection and Klein-Gordon have closed forms (``exact_field``). Viscous Burgers does not,
so ``burgers_fd_solve`` integrates it on a dense grid with a second-order conservative
finite-difference scheme in space and classical RK4 in time. The accuracy of that
reference is certified rather than assumed: ``richardson_verify`` runs nested grids and
reports the observed convergence order, and only a certified solution is used to score
neural solutions.

.. admonition:: Odd symmetry

    The initial condition and the operator are odd in ``x``. The grid is built exactly
    antisymmetric and the diffusion stencil sums neighbours before subtracting the centre,
    so every RK stage maps an odd vector to an odd vector bit for bit and ``u(0, t)``
    stays identically zero.
'''
import json
import math
import logging
from pathlib import Path
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm
from scipy.interpolate import RegularGridInterpolator

from pitdn.diffcore.jet import Jet2, jet_eval
from pitdn.errors import StabilityError
from pitdn.problem import ProblemSpec


logger = logging.getLogger(__name__)

SAFETY = 0.9
ORDER_BAND = (1.7, 2.3)
EXACT_FLOOR = 1e-13

GRID_FILE = 'reference_grid.csv'
META_FILE = 'reference_meta.json'


@dataclass
class GridSolution:
    '''
    Solution sampled on a uniform tensor grid.

    Attributes:
        x:        ``nx + 1`` spatial nodes
        t:        ``nt + 1`` time nodes
        values:   ``(nt + 1, nx + 1)`` matrix, row ``n`` is the solution at ``t[n]``
        metadata: scheme description, viscosity, step sizes and stability numbers
    '''
    x        : np.ndarray
    t        : np.ndarray
    values   : np.ndarray
    metadata : dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (self.t.size, self.x.size):
            raise ValueError(
                f'grid values of shape {self.values.shape} do not match '
                f'({self.t.size}, {self.x.size}) nodes'
            )
        self._interp = None

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def sample(self, x, t) -> np.ndarray:
        '''
        Bilinear interpolation at arbitrary ``(x, t)`` inside the grid.
        '''
        if self._interp is None:
            self._interp = RegularGridInterpolator((self.t, self.x), self.values, method='linear')

        x, t = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(t, dtype=np.float64))
        points = np.column_stack([t.reshape(-1), x.reshape(-1)])

        return self._interp(points).reshape(x.shape)

    def save(self, directory: str | Path):
        '''
        Write ``reference_grid.csv`` (header ``t`` then the x-nodes, one row per time step)
        and the ``reference_meta.json`` sidecar.
        '''
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)

        table = np.column_stack([self.t, self.values])
        header = ','.join(['t'] + [repr(float(x)) for x in self.x])
        np.savetxt(directory / GRID_FILE, table, delimiter=',', header=header, comments='', fmt='%.17g')

        (directory / META_FILE).write_text(json.dumps(self.metadata, indent=2, default=str))

        logger.info(f'Wrote {self.values.shape[0]}x{self.values.shape[1]} reference grid to "{directory}"')

    @classmethod
    def load(cls, directory: str | Path) -> 'GridSolution':
        directory = Path(directory)

        with (directory / GRID_FILE).open() as f:
            header = f.readline().strip().split(',')
        table = np.loadtxt(directory / GRID_FILE, delimiter=',', skiprows=1, ndmin=2)

        x = np.array([float(v) for v in header[1:]])
        metadata = {}
        if (directory / META_FILE).exists():
            metadata = json.loads((directory / META_FILE).read_text())

        return cls(x, table[:, 0].copy(), table[:, 1:].copy(), metadata)


def stable_dt(nx: int, nu: float, u_max: float = 1.0, x_lo: float = -1.0, x_hi: float = 1.0) -> float:
    '''
    Largest explicit step allowed: ``0.9 min(0.5 dx^2 / nu, dx / max|u|)``.
    '''
    dx = (x_hi - x_lo) / nx

    limits = [0.5 * dx * dx / nu] if nu > 0 else []
    if u_max > 0:
        limits.append(dx / u_max)

    return SAFETY * min(limits) if limits else math.inf

def minimal_nt(nx: int, nu: float = 0.01/math.pi, t_end: float = 1.0, u_max: float = 1.0) -> int:
    return max(1, math.ceil(round(t_end / stable_dt(nx, nu, u_max), 9)))

def burgers_fd_solve(
    nx       : int,
    nt       : int | None = None,
    nu       : float = 0.01/math.pi,
    t_end    : float = 1.0,
    progress : bool  = False,
) -> GridSolution:
    '''
    Viscous Burgers on ``[-1, 1]`` from ``u0 = -sin(pi x)`` with zero Dirichlet walls.

    Conservative convection (central difference of the ``u^2/2`` flux), central diffusion,
    RK4 in time.

    Parameters:
        nx: number of spatial intervals (even, so ``x = 0`` is a node)
        nt: number of time steps; ``None`` picks the smallest stable count

    Raises:
        StabilityError: the step ``t_end/nt`` exceeds the explicit stability bound.
    '''
    if nx < 2 or nx % 2:
        raise ValueError(f'nx must be an even integer >= 2, got {nx}')

    x = np.linspace(-1.0, 1.0, nx + 1)
    x = 0.5 * (x - x[::-1])
    dx = 2.0 / nx

    u = -np.sin(np.pi * x)
    u = 0.5 * (u - u[::-1])
    u[0] = u[-1] = 0.0

    u_max = float(np.max(np.abs(u)))
    limit = stable_dt(nx, nu, u_max)
    nt_min = max(1, math.ceil(round(t_end / limit, 9)))
    if nt is None:
        nt = nt_min

    dt = t_end / nt
    if dt > limit:
        raise StabilityError(
            f'time step {dt:.3e} exceeds the explicit stability limit {limit:.3e} '
            f'(nx={nx}, nu={nu:.4g})',
            nt_min,
        )

    logger.debug(
        f'Burgers FD: nx={nx}, nt={nt}, dx={dx:.3e}, dt={dt:.3e}, '
        f'diffusion number {nu*dt/dx**2:.3f}, CFL {u_max*dt/dx:.3f}'
    )

    def rhs(w):
        flux = 0.5 * w * w
        out  = np.zeros_like(w)
        out[1:-1] = (
            -(flux[2:] - flux[:-2]) / (2*dx)
            + nu * ((w[2:] + w[:-2]) - 2*w[1:-1]) / (dx*dx)
        )
        return out

    values = np.empty((nt + 1, nx + 1))
    values[0] = u

    for n in tqdm(range(nt), desc='Burgers FD', disable=not progress):
        k1 = rhs(u)
        k2 = rhs(u + 0.5*dt*k1)
        k3 = rhs(u + 0.5*dt*k2)
        k4 = rhs(u + dt*k3)
        u  = u + (dt/6) * (k1 + 2*k2 + 2*k3 + k4)
        values[n + 1] = u

    t = np.linspace(0.0, t_end, nt + 1)

    metadata = {
        'scheme'          : 'conservative central FD (2nd order) + RK4',
        'nu'              : nu,
        'nx'              : nx,
        'nt'              : nt,
        'dx'              : dx,
        'dt'              : dt,
        'diffusion_number': nu * dt / dx**2,
        'cfl'             : u_max * dt / dx,
    }

    return GridSolution(x, t, values, metadata)


@dataclass
class RichardsonReport:
    '''
    Observed-order report over nested grids.

    ``errors[i]`` is the RMS difference between the final-time solutions on grids ``i``
    and ``i + 1`` at the coarse grid's nodes; ``orders[i] = log2(errors[i] / errors[i+1])``.
    ``solutions`` keeps the solver output per grid.
    '''
    grids     : list[int]
    errors    : list[float]
    orders    : list[float]
    flags     : list[str] = field(default_factory=list)
    band      : tuple[float, float] = ORDER_BAND
    solutions : list = field(default_factory=list, repr=False)

    @property
    def certified(self) -> bool:
        if self.flags or not self.orders:
            return False
        lo, hi = self.band
        return all(lo <= p <= hi for p in self.orders)

    def as_dict(self) -> dict:
        return {
            'grids'     : self.grids,
            'errors'    : self.errors,
            'orders'    : [None if math.isnan(p) else p for p in self.orders],
            'flags'     : self.flags,
            'certified' : self.certified,
        }


def _shared_nodes(coarse: GridSolution, fine: GridSolution) -> np.ndarray:
    ratio, rem = divmod(fine.x.size - 1, coarse.x.size - 1)
    if rem or ratio < 1:
        raise ValueError(
            f'grids with {coarse.x.size - 1} and {fine.x.size - 1} intervals are not nested'
        )
    return fine.final[::ratio]

def richardson_verify(solver, grids) -> RichardsonReport:
    '''
    Certify a solver by its observed order on nested grids.

    Parameters:
        solver: ``nx -> GridSolution``
        grids:  at least three increasing interval counts, each dividing the next
    '''
    grids = [int(g) for g in grids]
    if len(grids) < 3:
        raise ValueError(f'Richardson verification needs >= 3 grids, got {grids}')

    solutions = [solver(nx) for nx in grids]
    errors = [
        float(np.sqrt(np.mean((coarse.final - _shared_nodes(coarse, fine))**2)))
        for coarse, fine in zip(solutions[:-1], solutions[1:])
    ]

    flags  = []
    orders = []
    if max(errors) < EXACT_FLOOR:
        flags.append('exact')
        orders = [math.nan] * (len(errors) - 1)
    else:
        if any(later >= earlier for earlier, later in zip(errors[:-1], errors[1:])):
            flags.append('non-asymptotic')
        orders = [
            math.log2(earlier / later) if later > 0 else math.nan
            for earlier, later in zip(errors[:-1], errors[1:])
        ]

    report = RichardsonReport(grids, errors, orders, flags, solutions=solutions)
    logger.info(
        f'Richardson verification on {grids}: orders {orders}, flags {flags}, '
        f'certified={report.certified}'
    )

    return report

def time_refinement_error(nx: int, nt: int, nu: float = 0.01/math.pi, t_end: float = 1.0) -> float:
    '''
    Max final-time change when the step count doubles at fixed ``nx``.
    '''
    coarse = burgers_fd_solve(nx, nt, nu, t_end)
    fine   = burgers_fd_solve(nx, 2*nt, nu, t_end)
    return float(np.max(np.abs(coarse.final - fine.final)))

def exact_field(spec: ProblemSpec, x, t, channels='all') -> Jet2:
    '''
    Closed-form solution jet of ``spec`` at ``(x, t)``.

    Raises:
        MissingExactSolutionError: ``spec`` has no closed form (use ``burgers_fd_solve``).
    '''
    return jet_eval(spec.exact, x, t, channels)
