"""
Equation-of-state families parametrized by the sound speed, written through e(h) = log rho(h).

Every family is normalized so that rho(0) = 1. The incompressible member e = 0 is a separate class so that callers
branch on `incompressible` instead of dividing by e'(h) = 0.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from numpy.polynomial.legendre import leggauss

from utils.errors import NonpositiveKappa, DegenerateEos, ConfigError

__all__ = ['EosFamily', 'LinearFamily', 'TabulatedFamily', 'IncompressibleMember', 'default_family',
           'StructuralReport', 'verify_structural_conditions', 'MAX_DERIVATIVE']

MAX_DERIVATIVE = 6
_NODES, _WEIGHTS = leggauss(32)


def _integrate_from_zero(func, h):
    """int_0^h func(s) ds for every entry of h, with a fixed Gauss-Legendre rule."""
    h = np.asarray(h, dtype=float)
    s = 0.5 * h[..., None] * (_NODES + 1)
    return 0.5 * h * np.sum(_WEIGHTS * func(s), axis=-1)


def _check_kappa(kappa):
    if not kappa > 0:
        msg = f'Sound speed parameter kappa must be positive, got {kappa}'
        raise NonpositiveKappa(msg)


class EosFamily(ABC):
    """
    A member of the sound-speed family: e(h), its derivatives up to order 6, rho = exp(e), p(h) = int_0^h rho.
    """
    name = None
    incompressible = False

    @abstractmethod
    def __init__(self, kappa):
        self.kappa = kappa

    def __repr__(self):
        return f'{self.__class__.__name__}(kappa={self.kappa})'

    @abstractmethod
    def derivative(self, k, h):
        """
        k-th derivative of e at h (k = 0 gives e itself).

        :param int k: order, 0 <= k <= 6
        :param h: enthalpy values
        :return np.ndarray:
        """

    def e(self, h):
        return self.derivative(0, h)

    def density(self, h):
        return np.exp(self.e(h))

    def pressure(self, h):
        return _integrate_from_zero(self.density, h)

    def internal_energy_density(self, h):
        """rho Q(rho) with Q(rho) = int_1^rho p(l) l^-2 dl, written as rho(h) int_0^h p e' / rho."""
        return self.density(h) * _integrate_from_zero(
            lambda s: self.pressure(s) * self.derivative(1, s) / self.density(s), h)

    @property
    def inverse_kappa(self):
        return 0.0 if np.isinf(self.kappa) else 1.0 / self.kappa

    @property
    def is_linear(self):
        """True when e'' vanishes identically, the only case the data builder accepts."""
        return False

    @abstractmethod
    def enthalpy_from_density(self, rho):
        """Inverse of rho(h)."""


class LinearFamily(EosFamily):
    """Default member e(h) = h / kappa."""
    name = 'linear'

    def __init__(self, kappa):
        _check_kappa(kappa)
        super().__init__(float(kappa))

    def derivative(self, k, h):
        h = np.asarray(h, dtype=float)
        if k == 0:
            return h / self.kappa
        if k == 1:
            return np.full(h.shape, 1 / self.kappa)
        return np.zeros(h.shape)

    def pressure(self, h):
        return self.kappa * np.expm1(np.asarray(h, dtype=float) / self.kappa)

    def internal_energy_density(self, h):
        h = np.asarray(h, dtype=float)
        rho = self.density(h)
        return self.kappa * (1 - rho) + rho * h

    @property
    def is_linear(self):
        return True

    def enthalpy_from_density(self, rho):
        return self.kappa * np.log(np.asarray(rho, dtype=float))


class TabulatedFamily(EosFamily):
    """
    Custom member given as a table of e and its first six derivatives on an increasing enthalpy grid.

    Values between table rows are interpolated linearly; e must be increasing so that rho(h) is invertible.
    """
    name = 'custom'

    def __init__(self, kappa, table):
        """
        :param float kappa: nominal sound-speed parameter of the member
        :param pd.DataFrame table: columns h, e0 .. e6
        """
        _check_kappa(kappa)
        super().__init__(float(kappa))
        missing = [c for c in ['h'] + [f'e{k}' for k in range(MAX_DERIVATIVE + 1)] if c not in table.columns]
        if missing:
            msg = f'EOS table is missing columns {missing}'
            raise ConfigError(msg, section='eos', key='table')

        table = table.sort_values('h').reset_index(drop=True)
        self.h_grid = table['h'].to_numpy(float)
        self.columns = np.stack([table[f'e{k}'].to_numpy(float) for k in range(MAX_DERIVATIVE + 1)])

        if np.any(np.diff(self.columns[0]) <= 0):
            msg = 'Tabulated e(h) must be strictly increasing'
            raise ConfigError(msg, section='eos', key='table')
        if self.h_grid[0] > 0 or self.h_grid[-1] < 0 or abs(np.interp(0.0, self.h_grid, self.columns[0])) > 1e-12:
            msg = 'Tabulated e(h) must cover h = 0 with e(0) = 0'
            raise ConfigError(msg, section='eos', key='table')

    @classmethod
    def from_csv(cls, kappa, path):
        return cls(kappa, pd.read_csv(path, comment='#'))

    def derivative(self, k, h):
        return np.interp(np.asarray(h, dtype=float), self.h_grid, self.columns[k])

    @property
    def is_linear(self):
        return bool(np.all(self.columns[2:] == 0))

    def enthalpy_from_density(self, rho):
        return np.interp(np.log(np.asarray(rho, dtype=float)), self.columns[0], self.h_grid)


class IncompressibleMember(EosFamily):
    """Degenerate member e = 0: rho = 1 and p = h."""
    name = 'incompressible'
    incompressible = True

    def __init__(self, kappa=np.inf):
        super().__init__(kappa)

    def derivative(self, k, h):
        return np.zeros(np.shape(h))

    def pressure(self, h):
        return np.asarray(h, dtype=float)

    def internal_energy_density(self, h):
        return np.zeros(np.shape(h))

    @property
    def is_linear(self):
        return True

    def enthalpy_from_density(self, rho):
        msg = 'The incompressible member has constant density; enthalpy cannot be recovered from it'
        raise DegenerateEos(msg)


def default_family(kappa):
    """
    The linear member e(h) = h / kappa, or the incompressible member for kappa = inf.

    :param float kappa: positive sound-speed parameter
    :return EosFamily:
    """
    _check_kappa(kappa)
    if np.isinf(kappa):
        return IncompressibleMember()
    return LinearFamily(kappa)


@dataclass
class StructuralReport:
    """Outcome of the structural checks |e^(k)| <= c0 and |e^(k)| <= c0 sqrt(e') for k = 1..6."""
    passed: bool
    worst_ratio: float
    bound_ratio: float
    sqrt_ratio: float
    worst_order: int
    worst_h: float
    ratios: dict = field(default_factory=dict)


def verify_structural_conditions(family, c0, h_range):
    """
    Check the structural conditions on sampled enthalpies; report-only, never raises on failure.

    Both |e^(k)| <= c0 and |e^(k)| <= c0 sqrt(e') are required for k = 1..6. The linear family therefore passes iff
    kappa >= max(1 / c0, 1 / c0^2): the square-root bound decides for c0 <= 1 and the plain bound for c0 > 1.

    :param EosFamily family:
    :param float c0: structural constant
    :param h_range: (h_min, h_max) pair sampled uniformly, or an explicit array of samples
    :return StructuralReport:
    """
    h_range = np.asarray(h_range, dtype=float)
    samples = np.linspace(h_range[0], h_range[1], 201) if h_range.size == 2 else h_range
    e1 = np.abs(family.derivative(1, samples))
    root = c0 * np.sqrt(e1)

    worst = (0.0, 0, float(samples[0]))
    bound_max = sqrt_max = 0.0
    ratios = {}
    for k in range(1, MAX_DERIVATIVE + 1):
        dk = np.abs(family.derivative(k, samples))
        bound = dk / c0
        with np.errstate(divide='ignore', invalid='ignore'):
            sqrt_bound = np.where(dk == 0, 0.0, dk / root)
        ratio = np.maximum(bound, sqrt_bound)
        idx = int(np.argmax(ratio))
        ratios[k] = float(ratio[idx])
        bound_max = max(bound_max, float(bound.max()))
        sqrt_max = max(sqrt_max, float(sqrt_bound.max()))
        if ratio[idx] > worst[0]:
            worst = (float(ratio[idx]), k, float(samples[idx]))

    return StructuralReport(worst[0] <= 1, worst[0], bound_max, sqrt_max, worst[1], worst[2], ratios)
