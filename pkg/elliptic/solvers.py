"""
Poisson problems for the Laplace-Beltrami operator on the moving domain.

On the reference disk the Laplacian separates over angular modes, so each mode is a small dense radial system that is
LU-factorized once per grid and boundary kind. Deformed geometries are solved with GMRES on the divergence-form operator,
preconditioned by the reference-disk solver.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import LinearOperator, gmres

from calculus.fields import Field, as_array
from calculus.operators import laplace_beltrami
from utils.core import get_logger
from utils.errors import NoConvergence, IncompatibleNeumann

__all__ = ['DIRICHLET', 'NEUMANN', 'EllipticProblem', 'SolveReport', 'solve', 'solve_report', 'flat_solve',
           'solve_dirichlet', 'solve_neumann', 'DEFAULT_TOLERANCE']

DIRICHLET = 'dirichlet'
NEUMANN = 'neumann'
DEFAULT_TOLERANCE = 1e-10

_RESTART = 60
_MAXITER = 30
_ATTEMPTS = 3


@lru_cache(maxsize=32)
def _mode_factors(disk, kind):
    """LU factors of the per-mode radial systems, boundary row replaced by the boundary condition."""
    r = disk.r
    factors = []
    for m, (dr_m, drr_m) in zip(disk.modes, disk.mode_operators):
        lap = drr_m + dr_m / r[:, None] - np.diag(m ** 2 / r ** 2)
        if kind == DIRICHLET:
            lap[0] = 0
            lap[0, 0] = 1
        else:
            lap[0] = dr_m[0]
        if kind == NEUMANN and m == 0:
            n = disk.n_r
            bordered = np.zeros((n + 1, n + 1))
            bordered[:n, :n] = lap
            bordered[1:n, n] = disk.n_theta
            bordered[n, :n] = disk.radial_weights * 2 * np.pi / disk.n_theta
            lap = bordered
        factors.append(lu_factor(lap))
    return factors


def flat_solve(disk, rhs, boundary, kind=DIRICHLET, constraint=0.0):
    """
    Solve the Laplace problem on the reference disk.

    Interior rows of `rhs` are right-hand sides of Lap q = rhs, the boundary row is replaced by `boundary`: values for
    Dirichlet, outward normal derivatives for Neumann. Neumann problems add a constant multiplier lam to the interior
    equations and fix the mean of q through `constraint` = int q dA.

    :param ReferenceDisk disk:
    :param np.ndarray rhs: shape (n_r, n_theta)
    :param np.ndarray boundary: shape (n_theta,)
    :param str kind: DIRICHLET or NEUMANN
    :param float constraint: prescribed integral of q, Neumann only
    :return tuple: (q as an array, lam)
    """
    coeffs = np.fft.rfft(np.asarray(rhs, dtype=float), axis=-1)
    coeffs[0] = np.fft.rfft(np.broadcast_to(np.asarray(boundary, dtype=float), (disk.n_theta,)))
    out = np.empty_like(coeffs)
    lam = 0.0
    for m, factor in enumerate(_mode_factors(disk, kind)):
        b = np.stack([coeffs[:, m].real, coeffs[:, m].imag], axis=-1)
        if kind == NEUMANN and m == 0:
            b = np.vstack([b, [constraint, 0.0]])
            x = lu_solve(factor, b)
            lam = float(x[-1, 0])
            x = x[:-1]
        else:
            x = lu_solve(factor, b)
        out[:, m] = x[:, 0] + 1j * x[:, 1]
    return np.fft.irfft(out, n=disk.n_theta, axis=-1), lam


@dataclass
class SolveReport:
    """Solution of an elliptic problem with its solver statistics."""
    solution: Field
    iterations: int
    residual: float
    defect: float = 0.0
    multiplier: float = 0.0
    method: str = 'modal'


@dataclass
class EllipticProblem:
    """
    Lap_g q = rhs in the current domain with a Dirichlet or Neumann condition on the free boundary.

    Neumann data is the outward normal derivative. Its compatibility defect int rhs - oint flux is recorded; it is
    subtracted from rhs as a constant when project_mean is set, otherwise a nonzero defect is refused.

    GMRES stops at a residual of tolerance relative to the data, or at absolute_tolerance when that is larger.
    """
    rhs: Field
    geometry: object
    kind: str = DIRICHLET
    value: object = 0.0
    tolerance: float = DEFAULT_TOLERANCE
    project_mean: bool = True
    absolute_tolerance: float = 0.0
    defect: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.kind not in (DIRICHLET, NEUMANN):
            msg = f'Unknown boundary condition {self.kind!r}'
            raise ValueError(msg)
        if not 1e-14 < self.tolerance < 1e-4:
            msg = f'Elliptic tolerance must lie in (1e-14, 1e-4), got {self.tolerance}'
            raise ValueError(msg)
        if self.absolute_tolerance < 0:
            msg = f'Absolute tolerance must be nonnegative, got {self.absolute_tolerance}'
            raise ValueError(msg)
        if self.rhs.rank:
            msg = 'Elliptic problems take a scalar right-hand side'
            raise ValueError(msg)

        n_theta = self.geometry.disk.n_theta
        self.boundary_data = np.broadcast_to(as_array(self.value), (n_theta,)).copy()
        if self.kind == NEUMANN:
            cache = self.geometry
            self.defect = float(cache.integrate(self.rhs.data) - cache.integrate_boundary(self.boundary_data))

    def solve(self, logger=None):
        return solve(self, logger=logger)

    def solve_report(self, logger=None):
        return solve_report(self, logger=logger)


def _is_reference(cache):
    return np.allclose(cache.map.positions, cache.disk.y, rtol=0, atol=1e-14)


def _boundary_operator(q, cache, kind):
    if kind == DIRICHLET:
        return q[0]
    grad = cache.map.eulerian_derivative(q)[:, 0, :]
    return np.sum(cache.normal * grad, axis=0)


def _apply(q, lam, cache, kind):
    out = laplace_beltrami(Field(q), cache).data
    if kind == NEUMANN:
        out = out + lam
    out[0] = _boundary_operator(q, cache, kind)
    return out


def solve_report(problem, logger=None):
    """
    Solve an elliptic problem and report iterations, final relative residual and Neumann defect.

    :param EllipticProblem problem:
    :param logger: optional logger
    :return SolveReport:
    """
    logger = get_logger(logger)
    cache = problem.geometry
    disk = cache.disk
    kind = problem.kind
    rhs = problem.rhs.data.copy()

    if kind == NEUMANN and problem.defect:
        scale = max(1.0, float(np.abs(rhs).max()), float(np.abs(problem.boundary_data).max()))
        if problem.project_mean:
            rhs -= problem.defect / cache.volume
        elif abs(problem.defect) > problem.tolerance * scale:
            msg = f'Neumann data is incompatible: int rhs - oint flux = {problem.defect:.3e}'
            raise IncompatibleNeumann(msg, defect=problem.defect)

    target = rhs.copy()
    target[0] = problem.boundary_data
    norm_b = float(np.linalg.norm(target))
    if norm_b == 0:
        return SolveReport(Field.zeros(disk), 0, 0.0, problem.defect)

    if _is_reference(cache):
        q, lam = flat_solve(disk, rhs, problem.boundary_data, kind)
        residual = float(np.linalg.norm(_apply(q, lam, cache, kind) - target)) / norm_b
        return _finish(q, lam, cache, kind, SolveReport(None, 1, residual, problem.defect, lam, 'modal'))

    size = disk.n_r * disk.n_theta
    extra = 1 if kind == NEUMANN else 0
    weights = cache.area_weights.ravel()

    def matvec(x):
        q = x[:size].reshape(disk.shape)
        out = _apply(q, x[size] if extra else 0.0, cache, kind).ravel()
        if extra:
            out = np.append(out, weights @ x[:size])
        return out

    def precondition(y):
        res = y[:size].reshape(disk.shape)
        q, lam = flat_solve(disk, res, res[0], kind, constraint=y[size] if extra else 0.0)
        return np.append(q.ravel(), lam) if extra else q.ravel()

    operator = LinearOperator((size + extra, size + extra), matvec=matvec, dtype=float)
    preconditioner = LinearOperator((size + extra, size + extra), matvec=precondition, dtype=float)
    b = np.append(target.ravel(), 0.0) if extra else target.ravel()

    x = precondition(b)
    # the relative target, or the absolute floor when that is looser
    threshold = max(problem.tolerance, problem.absolute_tolerance / norm_b)
    iterations = 0
    residual = np.inf
    for attempt in range(_ATTEMPTS):
        counter = []
        x, info = gmres(operator, b, x0=x, rtol=threshold * 0.1, atol=0.0, restart=_RESTART,
                        maxiter=_MAXITER, M=preconditioner, callback=counter.append, callback_type='pr_norm')
        iterations += len(counter)
        residual = float(np.linalg.norm(matvec(x) - b)) / norm_b
        logger.debug(f'gmres attempt {attempt + 1}: info={info}, iterations={len(counter)}, residual={residual:.3e}')
        if residual <= threshold:
            break
    else:
        msg = f'GMRES did not reach {threshold:.1e} after {iterations} iterations (residual {residual:.3e})'
        raise NoConvergence(msg, iterations=iterations, residual=residual)

    q = x[:size].reshape(disk.shape)
    lam = float(x[size]) if extra else 0.0
    return _finish(q, lam, cache, kind, SolveReport(None, iterations, residual, problem.defect, lam, 'gmres'))


def _finish(q, lam, cache, kind, report):
    if kind == DIRICHLET:
        q = q.copy()
    else:
        q = q - cache.integrate(q) / cache.volume
    report.solution = Field(q)
    report.multiplier = lam
    return report


def solve(problem, logger=None):
    """
    Solve an elliptic problem.

    :param EllipticProblem problem:
    :return Field: the solution; Neumann solutions have zero mean
    """
    return solve_report(problem, logger=logger).solution


def solve_dirichlet(rhs, cache, value=0.0, tolerance=DEFAULT_TOLERANCE, absolute_tolerance=0.0, logger=None):
    """Lap_g q = rhs with q = value on the boundary."""
    rhs = rhs if isinstance(rhs, Field) else Field(rhs)
    problem = EllipticProblem(rhs, cache, DIRICHLET, value, tolerance, absolute_tolerance=absolute_tolerance)
    return solve(problem, logger=logger)


def solve_neumann(rhs, cache, flux=0.0, tolerance=DEFAULT_TOLERANCE, project_mean=True, logger=None):
    """Lap_g q = rhs with N.dq = flux on the boundary, returned with zero mean."""
    rhs = rhs if isinstance(rhs, Field) else Field(rhs)
    return solve(EllipticProblem(rhs, cache, NEUMANN, flux, tolerance, project_mean), logger=logger)
